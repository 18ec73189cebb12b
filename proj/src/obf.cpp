#include "optbasis/obf.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace optbasis {

namespace {

template <class T> T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T> void put(std::ofstream &out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <class T> T get(std::ifstream &in, const std::filesystem::path &path) {
  T v;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof(T)))
    throw Error(ErrorKind::IoError, "truncated basis file " + path.string());
  return to_little(v);
}

void put_doubles(std::ofstream &out, const double *p, Index count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char *>(p),
              static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    for (Index i = 0; i < count; ++i)
      put(out, p[i]);
  }
}

void get_doubles(std::ifstream &in, double *p, Index count,
                 const std::filesystem::path &path) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char *>(p),
                 static_cast<std::streamsize>(count * sizeof(double))))
      throw Error(ErrorKind::IoError, "truncated basis file " + path.string());
  } else {
    for (Index i = 0; i < count; ++i)
      p[i] = get<double>(in, path);
  }
}

} // namespace

void write_obf(const std::filesystem::path &path, const SVDBasis &basis) {
  const Index n = basis.size();
  const Index r = basis.rank();
  if (basis.u_hat.cols() != r || basis.v_hat.rows() != n || basis.v_hat.cols() != r)
    throw Error(ErrorKind::DimensionMismatch, "inconsistent basis shapes");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write("OBAS", 4);
  put<std::uint32_t>(out, kObfVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(n));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(r));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(basis.meta.tag));
  put_doubles(out, basis.lambdas.data(), r);
  put_doubles(out, basis.u_hat.data(), n * r);
  put_doubles(out, basis.v_hat.data(), n * r);
  if (!out)
    throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

SVDBasis read_obf(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "OBAS", 4) != 0)
    throw Error(ErrorKind::IoError, path.string() + " is not a basis file");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kObfVersion)
    throw Error(ErrorKind::IoError,
                "unsupported basis file version " + std::to_string(version));
  const auto n = static_cast<Index>(get<std::uint64_t>(in, path));
  const auto r = static_cast<Index>(get<std::uint64_t>(in, path));
  const auto tag = get<std::uint8_t>(in, path);
  if (tag > static_cast<std::uint8_t>(ProblemTag::Elliptic1D))
    throw Error(ErrorKind::IoError, "unknown problem tag " + std::to_string(tag));
  const auto expected = static_cast<std::uintmax_t>(4 + 4 + 8 + 8 + 1) +
                        static_cast<std::uintmax_t>(r + 2 * n * r) * sizeof(double);
  if (std::filesystem::file_size(path) != expected)
    throw Error(ErrorKind::IoError, "size of " + path.string() + " does not match its header");

  SVDBasis b;
  b.meta.tag = static_cast<ProblemTag>(tag);
  b.meta.requested_rank = r;
  b.lambdas.resize(r);
  b.u_hat.resize(n, r);
  b.v_hat.resize(n, r);
  get_doubles(in, b.lambdas.data(), r, path);
  get_doubles(in, b.u_hat.data(), n * r, path);
  get_doubles(in, b.v_hat.data(), n * r, path);
  return b;
}

std::filesystem::path sidecar_path(const std::filesystem::path &basis_path) {
  std::filesystem::path p = basis_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_sidecar(const std::filesystem::path &basis_path,
                   const ExperimentConfig &cfg, const SVDBasis &basis) {
  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(serialize_config(cfg));
  doc["basis"] = {{"problem", to_string(basis.meta.tag)},
                  {"N", basis.size()},
                  {"rank", basis.rank()},
                  {"requested_rank", basis.meta.requested_rank},
                  {"sobolev_order", basis.meta.sobolev_order},
                  {"seed", basis.meta.seed},
                  {"oversample", basis.meta.oversample},
                  {"power", basis.meta.power}};
  const auto path = sidecar_path(basis_path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

} // namespace optbasis
