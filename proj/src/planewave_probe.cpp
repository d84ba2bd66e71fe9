#include "speclog/planewave.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>
#include <fmt/format.h>

#include "speclog/quadrature.hpp"

namespace speclog {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Antiderivative of |t|^{2s} ln t^2 vanishing at 0; odd in t.
double symbol_antiderivative(double s, double t) {
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  const double p = 2.0 * s + 1.0;
  const double v = std::pow(a, p) * (std::log(a * a) / p - 2.0 / (p * p));
  return t < 0.0 ? -v : v;
}

}  // namespace

double planewave_main_coefficient(const SpectralParams& params, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("plane-wave radius must be positive");
  const int n = params.n();
  const double p = params.homogeneity();
  return 2.0 * n * unit_ball_volume(n) / p * std::pow(r, p) * (std::log(r) - 1.0 / p);
}

PlaneWaveEnergy cutoff_planewave_energy(const CutoffProfile& profile, const DomainGeometry& geom,
                                        const SpectralParams& params, double r, const ProbeConfig& config) {
  if (params.n() != 1 || geom.n != 1) throw std::invalid_argument("plane-wave probe is implemented for n = 1 only");
  if (!geom.isBox()) throw std::invalid_argument("plane-wave probe needs a box domain");
  const double L = (*geom.boxLengths)[0];
  if (!(profile.sigma > 0.0 && profile.sigma < 0.5 * L)) {
    throw std::invalid_argument(fmt::format("cutoff width sigma = {} must lie in (0, L/2 = {})", profile.sigma, 0.5 * L));
  }
  const double positivityRadius = std::exp(1.0 / params.homogeneity());
  if (!(r >= positivityRadius)) {
    throw std::invalid_argument(
        fmt::format("plane-wave radius r = {} is below the positivity radius {} of the ball coefficient", r,
                    positivityRadius));
  }
  if (config.samples < (std::size_t{1} << 14) || config.samples % 2 != 0) {
    throw std::invalid_argument("plane-wave probe needs an even sample count of at least 2^14");
  }
  if (!(config.paddedLength >= 2.0 * L)) throw std::invalid_argument("padded window must be at least twice the domain");
  const double nyquist = std::numbers::pi * static_cast<double>(config.samples) / config.paddedLength;
  if (nyquist < config.frequencyCutoff + r) {
    throw std::invalid_argument(fmt::format("under-resolved cutoff transform: Nyquist {} < cutoff {} + r {}", nyquist,
                                            config.frequencyCutoff, r));
  }

  const std::size_t N = config.samples;
  const double h = config.paddedLength / static_cast<double>(N);
  const double x0 = 0.5 * L - 0.5 * config.paddedLength;
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * N)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (N / 2 + 1))));
  if (!in || !out) throw std::bad_alloc();

  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(N), in.get(), out.get(), FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("FFTW planning failed");
  for (std::size_t i = 0; i < N; ++i) {
    const double x = x0 + h * static_cast<double>(i);
    const double pt[1] = {x};
    in.get()[i] = cutoff_value(profile, geom, pt);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  // |w^(eta_k)|^2 = h^2 |F_k|^2 / (2 pi); the integrand is even in eta.
  const double dEta = 2.0 * std::numbers::pi / config.paddedLength;
  const double norm = h * h / (2.0 * std::numbers::pi);
  const double s = params.s();
  double lhs = 0.0;
  for (std::size_t k = 0; k <= N / 2; ++k) {
    const double eta = dEta * static_cast<double>(k);
    const double re = out.get()[k][0];
    const double im = out.get()[k][1];
    const double kernel = symbol_antiderivative(s, eta + r) - symbol_antiderivative(s, eta - r);
    const double weight = (k == 0 || k == N / 2) ? 1.0 : 2.0;
    lhs += weight * norm * (re * re + im * im) * kernel;
  }
  lhs *= dEta;

  PlaneWaveEnergy e;
  e.lhs = lhs;
  e.cutoffMass = cutoff_mass(profile, geom);
  e.mainTerm = ball_symbol_integral(params, r) * e.cutoffMass;
  e.remainder = e.lhs - e.mainTerm;
  e.nyquist = nyquist;
  return e;
}

double cutoff_transform_sq(const CutoffProfile& profile, const DomainGeometry& geom, double eta) {
  if (geom.n != 1 || !geom.isBox()) throw std::invalid_argument("cutoff transform oracle is 1D only");
  const double L = (*geom.boxLengths)[0];
  const double sigma = std::min(profile.sigma, 0.5 * L);
  const GaussRule& rule = gauss_legendre(16);
  constexpr int kPanels = 32;
  std::complex<double> sum = 0.0;
  auto layer = [&](double a, double b) {
    std::vector<double> nodes;
    std::vector<double> weights;
    for (int p = 0; p < kPanels; ++p) append_panel(a + (b - a) * p / kPanels, a + (b - a) * (p + 1) / kPanels, rule, nodes, weights);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double pt[1] = {nodes[i]};
      sum += weights[i] * cutoff_value(profile, geom, pt) * std::exp(std::complex<double>(0.0, -eta * nodes[i]));
    }
  };
  layer(0.0, sigma);
  layer(L - sigma, L);
  if (L - sigma > sigma) {
    // w = 1 on the interior
    if (eta == 0.0) {
      sum += L - 2.0 * sigma;
    } else {
      sum += (std::exp(std::complex<double>(0.0, -eta * sigma)) - std::exp(std::complex<double>(0.0, -eta * (L - sigma)))) /
             std::complex<double>(0.0, eta);
    }
  }
  return std::norm(sum) / (2.0 * std::numbers::pi);
}

ScalingFit fit_remainder_scaling(std::span<const double> radii, std::span<const double> sigmas,
                                 std::span<const double> remainders) {
  const std::size_t m = remainders.size();
  if (radii.size() != m || sigmas.size() != m) throw std::invalid_argument("scaling fit inputs differ in length");
  if (m < 3) throw std::invalid_argument("scaling fit needs at least 3 samples");
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(radii[i] > 0.0 && sigmas[i] > 0.0) || remainders[i] == 0.0) {
      throw std::invalid_argument("scaling fit needs positive r, sigma and a nonzero remainder");
    }
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = 1.0;
    design(row, 1) = std::log(radii[i]);
    design(row, 2) = std::log(sigmas[i]);
    rhs(row) = std::log(std::abs(remainders[i]));
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw std::invalid_argument("scaling fit needs at least two distinct r and two distinct sigma");
  const Eigen::Vector3d coef = qr.solve(rhs);
  return {coef(0), coef(1), coef(2), (design * coef - rhs).norm()};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more matched samples");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(std::abs(y[i]));
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(std::abs(y[i])) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs distinct x values");
  return sxy / sxx;
}

}  // namespace speclog
