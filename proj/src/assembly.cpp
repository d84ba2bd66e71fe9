#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "speclog/quadrature.hpp"
#include "speclog/solver.hpp"

namespace speclog {

namespace {

constexpr double kGradingRatio = 0.2;
constexpr int kTailNodesPerPanel = 16;
constexpr int kTailLevels = 20;
constexpr Eigen::Index kColumnBlock = 32;
constexpr double kTailFloor = 1e-14;
constexpr const char* kDigestVersion = "speclog-form-v1";

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failureMutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Half-line bulk nodes on [0, cutoff], cutoff rounded up to the lattice pi/L.
struct AxisRule {
  double length = 0.0;
  double cutoff = 0.0;
  std::vector<double> xi;
  std::vector<double> w;
};

AxisRule bulk_half_line(double length, const QuadratureConfig& quad) {
  AxisRule rule;
  rule.length = length;
  const double spacing = std::numbers::pi / length;
  const auto steps = static_cast<long long>(std::ceil(quad.cutoffRadius / spacing - 1e-9));
  rule.cutoff = static_cast<double>(steps) * spacing;
  const GaussRule& gauss = gauss_legendre(quad.nodesPerPanel);
  const double panel = spacing / quad.panelsPerSpacing;
  append_graded(panel, kGradingRatio, quad.gradingLevels, gauss, rule.xi, rule.w);
  const long long panels = steps * quad.panelsPerSpacing;
  for (long long i = 1; i < panels; ++i) {
    append_panel(static_cast<double>(i) * panel, static_cast<double>(i + 1) * panel, gauss, rule.xi, rule.w);
  }
  return rule;
}

// Nodes for int_cutoff^inf f through xi = cutoff / t; weights include the Jacobian.
void append_tail(double cutoff, std::vector<double>& xi, std::vector<double>& w) {
  std::vector<double> t;
  std::vector<double> tw;
  append_graded(1.0, kGradingRatio, kTailLevels, gauss_legendre(kTailNodesPerPanel), t, tw);
  for (std::size_t i = 0; i < t.size(); ++i) {
    xi.push_back(cutoff / t[i]);
    w.push_back(tw[i] * cutoff / (t[i] * t[i]));
  }
}

double resonance(double length, int j) { return j * std::numbers::pi / length; }

// u_j(xi) = sqrt(2/(pi L)) a / (a^2 - xi^2); same-parity products u_j u_k give Re(e_j^ conj e_k^) without the cosine.
double envelope(double length, int j, double xi) {
  const double a = resonance(length, j);
  return std::sqrt(2.0 / (std::numbers::pi * length)) * a / (a * a - xi * xi);
}

double envelope_derivative(double length, int j, double xi) {
  const double a = resonance(length, j);
  const double d = a * a - xi * xi;
  return std::sqrt(2.0 / (std::numbers::pi * length)) * a * 2.0 * xi / (d * d);
}

double parity_sign(int j) { return (j % 2 == 0) ? 1.0 : -1.0; }

bool same_parity(int j, int k) { return (j - k) % 2 == 0; }

void validate_symbol(const SpectralParams& params, const Symbol& symbol) {
  if (symbol.kind == SymbolKind::fractionalLog) {
    if (symbol.order != params.s()) {
      throw std::invalid_argument("fractional-log symbol order must equal the spectral parameter s");
    }
  } else if (symbol.kind == SymbolKind::fractional) {
    if (!(symbol.order >= 0.0 && symbol.order <= 1.0)) {
      throw std::invalid_argument("fractional symbol order must lie in [0, 1]");
    }
  } else {
    throw std::invalid_argument("unknown symbol kind");
  }
}

// Same-parity tail pieces per pair at the cutoff: h = m u_j u_k and its first three derivatives.
struct TailEdge {
  double h = 0.0;
  double dh = 0.0;
  double d2h = 0.0;
  double d3h = 0.0;
};

// Fills d2h, d3h by central differences of the analytic first derivative.
template <class Derivative>
TailEdge edge_values(double h, double cutoff, double delta, Derivative&& dh) {
  TailEdge e;
  e.h = h;
  e.dh = dh(cutoff);
  const double plus = dh(cutoff + delta);
  const double minus = dh(cutoff - delta);
  e.d2h = (plus - minus) / (2.0 * delta);
  e.d3h = (plus - 2.0 * e.dh + minus) / (delta * delta);
  return e;
}

// Oscillatory tail of 2 int_cutoff^inf h (-sigma cos(L xi)) by integration by parts,
// and the size of the omitted terms up to the next one that survives sin(L cutoff) = 0.
struct OscillatoryTail {
  double value = 0.0;
  double error = 0.0;
};

OscillatoryTail oscillatory_tail(const TailEdge& e, double sigma, double length, double cutoff, int tailOrder) {
  const double sn = std::sin(length * cutoff);
  const double cs = std::cos(length * cutoff);
  OscillatoryTail out;
  const double first = e.h * sn / length;
  const double second = e.dh * cs / (length * length);
  if (tailOrder >= 2) out.value += 2.0 * sigma * first;
  if (tailOrder >= 3) out.value += 2.0 * sigma * second;
  if (tailOrder < 2) out.error += 2.0 * std::abs(first);
  if (tailOrder < 3) out.error += 2.0 * std::abs(second);
  const double l3 = length * length * length;
  out.error += 2.0 * (std::abs(e.d2h * sn) / l3 + std::abs(e.d3h * cs) / (l3 * length));
  return out;
}

std::string tail_rejection(const std::string& index, double estimate, double diagonal) {
  return fmt::format(
      "quadrature invariant 'tail estimate below {:g} of the diagonal entry' failed at {}: estimate {:.3e}, "
      "diagonal {:.6e}; raise cutoffRadius or tailOrder",
      kTailTolerance, index, estimate, diagonal);
}

void mirror_upper(Eigen::MatrixXd& m) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    for (Eigen::Index j = k + 1; j < m.rows(); ++j) m(j, k) = m(k, j);
  }
}

FormMatrix assemble_1d(const GalerkinBasis& basis, const SpectralParams& params, const QuadratureConfig& quad,
                       const Symbol& symbol, unsigned threads) {
  const double L = (*basis.box.boxLengths)[0];
  const auto N = static_cast<Eigen::Index>(basis.size());
  const AxisRule half = bulk_half_line(L, quad);
  const double cutoff = half.cutoff;

  const auto H = static_cast<Eigen::Index>(half.xi.size());
  const Eigen::Index Q = 2 * H;
  Eigen::VectorXd xi(Q);
  Eigen::VectorXd wm(Q);
  for (Eigen::Index i = 0; i < H; ++i) {
    const double x = half.xi[static_cast<std::size_t>(H - 1 - i)];
    const double w = half.w[static_cast<std::size_t>(H - 1 - i)];
    xi(i) = -x;
    wm(i) = w * symbol.value(x);
  }
  for (Eigen::Index i = 0; i < H; ++i) {
    xi(H + i) = half.xi[static_cast<std::size_t>(i)];
    wm(H + i) = half.w[static_cast<std::size_t>(i)] * symbol.value(xi(H + i));
  }

  Eigen::MatrixXd zr(Q, N);
  Eigen::MatrixXd zi(Q, N);
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t col) {
    const auto c = static_cast<Eigen::Index>(col);
    const int j = basis.indexSet[col][0];
    for (Eigen::Index p = 0; p < Q; ++p) {
      const std::complex<double> z = basis_transform_1d(L, j, xi(p), quad.singularityGuard);
      zr(p, c) = z.real();
      zi(p, c) = z.imag();
    }
  });

  // Tail beyond the cutoff: mean part by mapped quadrature, oscillatory part at the edge.
  Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd tailError = Eigen::MatrixXd::Zero(N, N);
  {
    std::vector<double> tx;
    std::vector<double> tw;
    append_tail(cutoff, tx, tw);
    const auto T = static_cast<Eigen::Index>(tx.size());
    Eigen::MatrixXd u(T, N);
    Eigen::VectorXd twm(T);
    for (Eigen::Index p = 0; p < T; ++p) {
      twm(p) = 2.0 * tw[static_cast<std::size_t>(p)] * symbol.value(tx[static_cast<std::size_t>(p)]);
      for (Eigen::Index j = 0; j < N; ++j) u(p, j) = envelope(L, basis.indexSet[j][0], tx[static_cast<std::size_t>(p)]);
    }
    const Eigen::MatrixXd mean = u.transpose() * twm.asDiagonal() * u;

    const double delta = std::min(1e-3 * cutoff, 0.25 * std::numbers::pi / L);
    auto edge_derivative = [&](double x, int j, int k) {
      return symbol.derivative(x) * envelope(L, j, x) * envelope(L, k, x) +
             symbol.value(x) * (envelope_derivative(L, j, x) * envelope(L, k, x) +
                                envelope(L, j, x) * envelope_derivative(L, k, x));
    };
    for (Eigen::Index k = 0; k < N; ++k) {
      for (Eigen::Index j = 0; j <= k; ++j) {
        const int jj = basis.indexSet[j][0];
        const int kk = basis.indexSet[k][0];
        if (!same_parity(jj, kk)) continue;
        const TailEdge e =
            edge_values(symbol.value(cutoff) * envelope(L, jj, cutoff) * envelope(L, kk, cutoff), cutoff, delta,
                        [&](double x) { return edge_derivative(x, jj, kk); });
        const OscillatoryTail osc = oscillatory_tail(e, parity_sign(jj), L, cutoff, quad.tailOrder);
        if (quad.tailOrder >= 1) {
          tail(j, k) = mean(j, k) + osc.value;
          tailError(j, k) = osc.error;
        } else {
          tailError(j, k) = std::abs(mean(j, k)) + osc.error;
        }
      }
    }
  }

  // Cheap diagonal pass before the full product.
  Eigen::VectorXd magnitude(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    double diag = 0.0;
    double mag = 0.0;
    for (Eigen::Index p = 0; p < Q; ++p) {
      const double sq = zr(p, j) * zr(p, j) + zi(p, j) * zi(p, j);
      diag += wm(p) * sq;
      mag += std::abs(wm(p)) * sq;
    }
    magnitude(j) = mag;
    diag += tail(j, j);
    if (tailError(j, j) > kTailTolerance * std::abs(diag) + kTailFloor) {
      throw std::invalid_argument(tail_rejection(fmt::format("j={}", basis.indexSet[j][0]), tailError(j, j), diag));
    }
  }

  const Eigen::MatrixXd yr = zr.array().colwise() * wm.array();
  const Eigen::MatrixXd yi = zi.array().colwise() * wm.array();
  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(N, N);
  const std::size_t blocks = static_cast<std::size_t>((N + kColumnBlock - 1) / kColumnBlock);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(b) * kColumnBlock;
    const Eigen::Index width = std::min(kColumnBlock, N - c0);
    const Eigen::Index rows = c0 + width;
    auto reBlock = re.block(0, c0, rows, width);
    auto imBlock = im.block(0, c0, rows, width);
    reBlock.noalias() = zr.leftCols(rows).transpose() * yr.middleCols(c0, width);
    reBlock.noalias() += zi.leftCols(rows).transpose() * yi.middleCols(c0, width);
    imBlock.noalias() = zi.leftCols(rows).transpose() * yr.middleCols(c0, width);
    imBlock.noalias() -= zr.leftCols(rows).transpose() * yi.middleCols(c0, width);
  });

  FormMatrix out{Eigen::MatrixXd::Zero(N, N), params, {}, Eigen::MatrixXd::Zero(N, N), 0.0};
  double residual = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    for (Eigen::Index j = 0; j <= k; ++j) {
      out.entries(j, k) = re(j, k) + tail(j, k);
      out.errorEstimate(j, k) = tailError(j, k);
      residual = std::max(residual, std::abs(im(j, k)) / std::sqrt(magnitude(j) * magnitude(k)));
    }
  }
  mirror_upper(out.entries);
  mirror_upper(out.errorEstimate);
  out.imaginaryResidual = residual;
  return out;
}

// Per-axis data for the 2D tensor assembly. Pairs (j, k) are flattened as j * M + k (0-based).
struct Axis2D {
  double length = 0.0;
  double cutoff = 0.0;
  std::vector<double> xi;  // bulk half line followed by mapped tail nodes
  std::vector<double> w;
  Eigen::Index bulk = 0;
  Eigen::MatrixXd re;     // Re(e_j^ conj e_k^) on bulk nodes, masked u_j u_k on tail nodes
  Eigen::MatrixXd imSum;  // Im(e_j^ conj e_k^)(xi) + Im(...)(-xi) on bulk nodes, 0 on tail nodes
  Eigen::MatrixXd absSq;  // |e_j^|^2 on bulk nodes, u_j^2 on tail nodes (per index, not per pair)
};

Axis2D make_axis(double length, int M, const QuadratureConfig& quad, unsigned threads) {
  Axis2D axis;
  axis.length = length;
  AxisRule half = bulk_half_line(length, quad);
  axis.cutoff = half.cutoff;
  axis.xi = std::move(half.xi);
  axis.w = std::move(half.w);
  axis.bulk = static_cast<Eigen::Index>(axis.xi.size());
  append_tail(axis.cutoff, axis.xi, axis.w);
  const auto P = static_cast<Eigen::Index>(axis.xi.size());
  axis.re.resize(P, M * M);
  axis.imSum.resize(P, M * M);
  axis.absSq.resize(P, M);
  parallel_for(static_cast<std::size_t>(P), threads, [&](std::size_t row) {
    const auto p = static_cast<Eigen::Index>(row);
    const double x = axis.xi[row];
    if (p < axis.bulk) {
      std::vector<std::complex<double>> plus(static_cast<std::size_t>(M));
      std::vector<std::complex<double>> minus(static_cast<std::size_t>(M));
      for (int j = 0; j < M; ++j) {
        plus[static_cast<std::size_t>(j)] = basis_transform_1d(length, j + 1, x, quad.singularityGuard);
        minus[static_cast<std::size_t>(j)] = basis_transform_1d(length, j + 1, -x, quad.singularityGuard);
        axis.absSq(p, j) = std::norm(plus[static_cast<std::size_t>(j)]);
      }
      for (int j = 0; j < M; ++j) {
        for (int k = 0; k < M; ++k) {
          const auto pj = plus[static_cast<std::size_t>(j)] * std::conj(plus[static_cast<std::size_t>(k)]);
          const auto mj = minus[static_cast<std::size_t>(j)] * std::conj(minus[static_cast<std::size_t>(k)]);
          axis.re(p, j * M + k) = pj.real();
          axis.imSum(p, j * M + k) = pj.imag() + mj.imag();
        }
      }
    } else {
      for (int j = 0; j < M; ++j) {
        const double uj = envelope(length, j + 1, x);
        axis.absSq(p, j) = uj * uj;
        for (int k = 0; k < M; ++k) {
          axis.re(p, j * M + k) = same_parity(j, k) ? uj * envelope(length, k + 1, x) : 0.0;
          axis.imSum(p, j * M + k) = 0.0;
        }
      }
    }
  });
  return axis;
}

// C(q, pair) for the oscillatory strip beyond the cutoff of `edge`, integrated against
// the other axis at node `other`: value (tail-order terms) and error (first omitted term).
void strip_coefficients(const Axis2D& edge, const Axis2D& other, int M, const Symbol& symbol, int tailOrder,
                        Eigen::MatrixXd& value, Eigen::MatrixXd& error) {
  const auto P = static_cast<Eigen::Index>(other.xi.size());
  value = Eigen::MatrixXd::Zero(P, M * M);
  error = Eigen::MatrixXd::Zero(P, M * M);
  const double L = edge.length;
  const double X = edge.cutoff;
  const double delta = std::min(1e-3 * X, 0.25 * std::numbers::pi / L);
  for (Eigen::Index q = 0; q < P; ++q) {
    const double y = other.xi[static_cast<std::size_t>(q)];
    auto h_of = [&](double x, int j, int k) {
      return symbol.value(std::hypot(x, y)) * envelope(L, j, x) * envelope(L, k, x);
    };
    auto dh_of = [&](double x, int j, int k) {
      const double r = std::hypot(x, y);
      return symbol.derivative(r) * (x / r) * envelope(L, j, x) * envelope(L, k, x) +
             symbol.value(r) * (envelope_derivative(L, j, x) * envelope(L, k, x) +
                                envelope(L, j, x) * envelope_derivative(L, k, x));
    };
    for (int j = 1; j <= M; ++j) {
      for (int k = 1; k <= M; ++k) {
        if (!same_parity(j, k)) continue;
        const TailEdge e = edge_values(h_of(X, j, k), X, delta, [&](double x) { return dh_of(x, j, k); });
        // 2D weights carry a factor 4 (both signs on both axes); oscillatory_tail already counts 2.
        const OscillatoryTail osc = oscillatory_tail(e, parity_sign(j), L, X, tailOrder);
        value(q, (j - 1) * M + (k - 1)) = 2.0 * osc.value;
        error(q, (j - 1) * M + (k - 1)) = 2.0 * osc.error;
      }
    }
  }
}

// Fixed-block product out = a^T b, parallel over column blocks of b.
void blocked_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& out, unsigned threads) {
  out.resize(a.cols(), b.cols());
  const Eigen::Index cols = b.cols();
  const std::size_t blocks = static_cast<std::size_t>((cols + kColumnBlock - 1) / kColumnBlock);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const Eigen::Index c0 = static_cast<Eigen::Index>(blk) * kColumnBlock;
    const Eigen::Index width = std::min(kColumnBlock, cols - c0);
    out.middleCols(c0, width).noalias() = a.transpose() * b.middleCols(c0, width);
  });
}

FormMatrix assemble_2d(const GalerkinBasis& basis, const SpectralParams& params, const QuadratureConfig& quad,
                       const Symbol& symbol, unsigned threads) {
  const int M = basis.maxIndexPerAxis;
  const auto& lengths = *basis.box.boxLengths;
  const Axis2D ax0 = make_axis(lengths[0], M, quad, threads);
  const Axis2D ax1 = make_axis(lengths[1], M, quad, threads);
  const auto P0 = static_cast<Eigen::Index>(ax0.xi.size());
  const auto P1 = static_cast<Eigen::Index>(ax1.xi.size());

  // Kt(q, p) = 4 w_p w_q m(|(xi_p, xi_q)|), stored transposed so products are a^T b.
  Eigen::MatrixXd kernelT(P1, P0);
  Eigen::MatrixXd kernelAbsT(P1, P0);
  parallel_for(static_cast<std::size_t>(P0), threads, [&](std::size_t pi) {
    const auto p = static_cast<Eigen::Index>(pi);
    for (Eigen::Index q = 0; q < P1; ++q) {
      const double v = 4.0 * ax0.w[pi] * ax1.w[static_cast<std::size_t>(q)] *
                       symbol.value(std::hypot(ax0.xi[pi], ax1.xi[static_cast<std::size_t>(q)]));
      kernelT(q, p) = v;
      kernelAbsT(q, p) = std::abs(v);
    }
  });

  Eigen::MatrixXd G;  // (P0, M^2): sum_q K(p, q) re1(q, pair1)
  Eigen::MatrixXd Gi;
  blocked_product(kernelT, ax1.re, G, threads);
  blocked_product(kernelT, ax1.imSum, Gi, threads);
  Eigen::MatrixXd pairRe;  // (M^2, M^2) indexed (pair0, pair1)
  Eigen::MatrixXd imA;
  Eigen::MatrixXd imB;
  blocked_product(ax0.re, G, pairRe, threads);
  blocked_product(ax0.imSum, G, imA, threads);
  blocked_product(ax0.re, Gi, imB, threads);

  Eigen::MatrixXd Gabs;
  blocked_product(kernelAbsT, ax1.absSq, Gabs, threads);
  const Eigen::MatrixXd magnitude = ax0.absSq.transpose() * Gabs;  // (M, M) indexed (j0, j1)

  Eigen::MatrixXd oscillatory = Eigen::MatrixXd::Zero(M * M, M * M);
  Eigen::MatrixXd oscError = Eigen::MatrixXd::Zero(M * M, M * M);
  {
    Eigen::MatrixXd c0v, c0e, c1v, c1e;
    strip_coefficients(ax0, ax1, M, symbol, quad.tailOrder, c0v, c0e);
    strip_coefficients(ax1, ax0, M, symbol, quad.tailOrder, c1v, c1e);
    Eigen::VectorXd w0(P0), w1(P1);
    for (Eigen::Index p = 0; p < P0; ++p) w0(p) = ax0.w[static_cast<std::size_t>(p)];
    for (Eigen::Index q = 0; q < P1; ++q) w1(q) = ax1.w[static_cast<std::size_t>(q)];
    const Eigen::MatrixXd re1w = w1.asDiagonal() * ax1.re;
    const Eigen::MatrixXd re0w = w0.asDiagonal() * ax0.re;
    oscillatory.noalias() = c0v.transpose() * re1w;
    oscillatory.noalias() += re0w.transpose() * c1v;
    oscError.noalias() = c0e.transpose() * re1w.cwiseAbs();
    oscError.noalias() += re0w.cwiseAbs().transpose() * c1e;
    // Doubly oscillatory corner term, estimated by two integrations by parts.
    const double X0 = ax0.cutoff;
    const double X1 = ax1.cutoff;
    const double corner = 2.0 * 4.0 * std::abs(symbol.value(std::hypot(X0, X1))) * 16.0 /
                          (X0 * X1 * ax0.length * ax0.length * ax1.length * ax1.length);
    for (int j0 = 1; j0 <= M; ++j0) {
      for (int k0 = 1; k0 <= M; ++k0) {
        if (!same_parity(j0, k0)) continue;
        const double e0 = std::abs(envelope(ax0.length, j0, X0) * envelope(ax0.length, k0, X0));
        for (int j1 = 1; j1 <= M; ++j1) {
          for (int k1 = 1; k1 <= M; ++k1) {
            if (!same_parity(j1, k1)) continue;
            const double e1 = std::abs(envelope(ax1.length, j1, X1) * envelope(ax1.length, k1, X1));
            oscError((j0 - 1) * M + (k0 - 1), (j1 - 1) * M + (k1 - 1)) += corner * e0 * e1;
          }
        }
      }
    }
  }

  const auto N = static_cast<Eigen::Index>(basis.size());
  FormMatrix out{Eigen::MatrixXd::Zero(N, N), params, {}, Eigen::MatrixXd::Zero(N, N), 0.0};
  double residual = 0.0;
  for (Eigen::Index K = 0; K < N; ++K) {
    const int k0 = basis.indexSet[K][0] - 1;
    const int k1 = basis.indexSet[K][1] - 1;
    for (Eigen::Index J = 0; J <= K; ++J) {
      const int j0 = basis.indexSet[J][0] - 1;
      const int j1 = basis.indexSet[J][1] - 1;
      const Eigen::Index pair0 = j0 * M + k0;
      const Eigen::Index pair1 = j1 * M + k1;
      out.entries(J, K) = pairRe(pair0, pair1) + oscillatory(pair0, pair1);
      out.errorEstimate(J, K) = oscError(pair0, pair1);
      const double imag = 0.5 * (imA(pair0, pair1) + imB(pair0, pair1));
      residual = std::max(residual, std::abs(imag) / std::sqrt(magnitude(j0, j1) * magnitude(k0, k1)));
    }
  }
  for (Eigen::Index J = 0; J < N; ++J) {
    const double diag = out.entries(J, J);
    if (out.errorEstimate(J, J) > kTailTolerance * std::abs(diag) + kTailFloor) {
      throw std::invalid_argument(tail_rejection(
          fmt::format("j=({},{})", basis.indexSet[J][0], basis.indexSet[J][1]), out.errorEstimate(J, J), diag));
    }
  }
  mirror_upper(out.entries);
  mirror_upper(out.errorEstimate);
  out.imaginaryResidual = residual;
  return out;
}

}  // namespace

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPECLOG_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::array<std::uint8_t, 32> form_digest(const GalerkinBasis& basis, const SpectralParams& params,
                                         const QuadratureConfig& quad, const Symbol& symbol) {
  const std::string key = fmt::format("{}|{}|n={} s={:.17g}|{}|{}", kDigestVersion, basis.describe(), params.n(),
                                      params.s(), quad.describe(), symbol.tag());
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(key.data(), key.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 || len != digest.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return digest;
}

FormMatrix assemble_form_matrix(const GalerkinBasis& basis, const SpectralParams& params, const QuadratureConfig& quad,
                                const Symbol& symbol, unsigned threads) {
  if (basis.size() == 0) throw std::invalid_argument("empty Galerkin basis");
  if (basis.dim() != params.n()) throw std::invalid_argument("basis dimension does not match the spectral parameters");
  validate_symbol(params, symbol);
  validate_quadrature(basis, quad);
  const unsigned workers = resolve_thread_count(threads);

  FormMatrix out = basis.dim() == 1 ? assemble_1d(basis, params, quad, symbol, workers)
                                    : assemble_2d(basis, params, quad, symbol, workers);
  if (!out.entries.allFinite()) throw std::runtime_error("assembled form matrix has non-finite entries");
  if (out.imaginaryResidual > kImaginaryTolerance) {
    throw std::runtime_error(fmt::format("imaginary residual {:.3e} exceeds {:g} of the entry magnitude",
                                         out.imaginaryResidual, kImaginaryTolerance));
  }
  out.provenance = {basis.describe(), quad.describe(), symbol, form_digest(basis, params, quad, symbol)};
  return out;
}

}  // namespace speclog
