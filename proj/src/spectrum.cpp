#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "speclog/solver.hpp"

namespace speclog {

Spectrum solve_spectrum(const FormMatrix& matrix, const DomainGeometry& geom) {
  const Eigen::MatrixXd& a = matrix.entries;
  if (a.rows() == 0 || a.rows() != a.cols()) throw std::invalid_argument("form matrix must be square and nonempty");
  if (!a.allFinite()) throw std::invalid_argument("form matrix has non-finite entries");
  if (a != a.transpose()) throw std::invalid_argument("form matrix is not exactly symmetric");
  if (geom.n != matrix.params.n()) throw std::invalid_argument("domain dimension does not match the form matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  Spectrum out{std::vector<double>(values.data(), values.data() + values.size()), matrix.size(), matrix.params, geom};
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double derivative_oracle_error(const FormMatrix& lower, const FormMatrix& upper, const FormMatrix& logarithmic,
                               double h) {
  const Symbol& lo = lower.provenance.symbol;
  const Symbol& hi = upper.provenance.symbol;
  const Symbol& lg = logarithmic.provenance.symbol;
  if (lo.kind != SymbolKind::fractional || hi.kind != SymbolKind::fractional) {
    throw std::invalid_argument("derivative oracle needs fractional symbols for the difference pair, got " + lo.tag() +
                                " and " + hi.tag());
  }
  if (lg.kind != SymbolKind::fractionalLog) {
    throw std::invalid_argument("derivative oracle needs a fractional-log reference matrix, got " + lg.tag());
  }
  const double scale = std::max(1.0, std::abs(lg.order));
  if (std::abs(hi.order - lo.order - 2.0 * h) > 1e-12 * scale ||
      std::abs(0.5 * (hi.order + lo.order) - lg.order) > 1e-12 * scale) {
    throw std::invalid_argument(fmt::format("derivative oracle orders {} and {} do not bracket {} with step {}",
                                            lo.order, hi.order, lg.order, h));
  }
  if (lower.provenance.basis != logarithmic.provenance.basis || upper.provenance.basis != logarithmic.provenance.basis ||
      lower.provenance.quadrature != logarithmic.provenance.quadrature ||
      upper.provenance.quadrature != logarithmic.provenance.quadrature) {
    throw std::invalid_argument("derivative oracle matrices come from different bases or quadratures");
  }
  const Eigen::MatrixXd diff = (upper.entries - lower.entries) / (2.0 * h);
  const Eigen::MatrixXd& ref = logarithmic.entries;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < ref.cols(); ++k) {
    for (Eigen::Index j = 0; j < ref.rows(); ++j) {
      worst = std::max(worst, std::abs(diff(j, k) - ref(j, k)) / std::max(1.0, std::abs(ref(j, k))));
    }
  }
  return worst;
}

double derivative_oracle_check(const GalerkinBasis& basis, const SpectralParams& params,
                               const QuadratureConfig& quad, double h, unsigned threads) {
  const double s = params.s();
  if (!(h > 0.0 && h < 0.5 * std::min(s, 1.0 - s))) {
    throw std::invalid_argument(fmt::format("derivative oracle step h must lie in (0, min(s, 1-s)/2), got {}", h));
  }
  const FormMatrix lower = assemble_form_matrix(basis, params, quad, Symbol::fractional(s - h), threads);
  const FormMatrix upper = assemble_form_matrix(basis, params, quad, Symbol::fractional(s + h), threads);
  const FormMatrix logarithmic = assemble_form_matrix(basis, params, quad, Symbol::fractionalLog(s), threads);
  return derivative_oracle_error(lower, upper, logarithmic, h);
}

}  // namespace speclog
