#include "speclog/matrix_cache.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace speclog {

namespace {

constexpr char kMagic[4] = {'S', 'L', 'F', 'M'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::vector<char>& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  buf.insert(buf.end(), std::begin(bytes), std::end(bytes));
}

template <class T>
bool take(const std::vector<char>& buf, std::size_t& pos, T& value) {
  if (pos + sizeof(T) > buf.size()) return false;
  char bytes[sizeof(T)];
  std::memcpy(bytes, buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  std::memcpy(&value, bytes, sizeof(T));
  pos += sizeof(T);
  return true;
}

}  // namespace

void write_matrix_cache(const std::filesystem::path& path, const FormMatrix& matrix) {
  std::vector<char> buf;
  buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(buf, kMatrixCacheVersion);
  put<double>(buf, static_cast<double>(matrix.params.n()));
  put<double>(buf, matrix.params.s());
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(matrix.size()));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(matrix.provenance.symbol.kind));
  buf.insert(buf.end(), matrix.provenance.digest.begin(), matrix.provenance.digest.end());
  const auto n = static_cast<Eigen::Index>(matrix.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) put<double>(buf, matrix.entries(j, k));
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open matrix cache for writing: " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("failed writing matrix cache: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<FormMatrix> read_matrix_cache(const std::filesystem::path& path, const GalerkinBasis& basis,
                                            const SpectralParams& params, const QuadratureConfig& quad,
                                            const Symbol& symbol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) return std::nullopt;
  std::size_t pos = sizeof(kMagic);
  std::uint32_t version = 0;
  double n = 0.0;
  double s = 0.0;
  std::uint32_t size = 0;
  std::uint8_t tag = 0;
  if (!take(buf, pos, version) || !take(buf, pos, n) || !take(buf, pos, s) || !take(buf, pos, size) ||
      !take(buf, pos, tag)) {
    return std::nullopt;
  }
  if (version != kMatrixCacheVersion || n != static_cast<double>(params.n()) || s != params.s() ||
      size != basis.size() || tag != static_cast<std::uint8_t>(symbol.kind)) {
    return std::nullopt;
  }
  std::array<std::uint8_t, 32> digest{};
  if (pos + digest.size() > buf.size()) return std::nullopt;
  std::memcpy(digest.data(), buf.data() + pos, digest.size());
  pos += digest.size();
  const auto expected = form_digest(basis, params, quad, symbol);
  if (digest != expected) return std::nullopt;

  const auto dim = static_cast<Eigen::Index>(size);
  const std::size_t count = static_cast<std::size_t>(size) * (size + 1) / 2;
  if (buf.size() != pos + count * sizeof(double)) return std::nullopt;
  FormMatrix out{Eigen::MatrixXd(dim, dim), params, {basis.describe(), quad.describe(), symbol, digest},
                 Eigen::MatrixXd(), 0.0};
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j; k < dim; ++k) {
      double v = 0.0;
      take(buf, pos, v);
      out.entries(j, k) = v;
      out.entries(k, j) = v;
    }
  }
  if (!out.entries.allFinite()) return std::nullopt;
  return out;
}

}  // namespace speclog
