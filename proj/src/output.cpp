#include "qcf/output.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#ifndef QCF_VERSION
#define QCF_VERSION "0.0.0"
#endif

namespace qcf {

namespace fs = std::filesystem;

std::string code_version() { return QCF_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_le(std::ofstream& out, const double* v, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      auto bits = std::bit_cast<std::uint64_t>(v[i]);
      char b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
      out.write(b, 8);
    }
  }
}

double read_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::vector<std::string> invariant_columns(std::size_t loops, int n) {
  std::vector<std::string> c = {"t",        "dt",       "h",        "mass",    "px",     "py",
                                "pz",       "C1_purity", "C2_bc",   "C2_b2",   "Lam1_max", "Lam2_max",
                                "C3",       "purity",   "tr_rho_tot_err", "min_D", "min_eig_rho", "herm_err"};
  for (std::size_t l = 0; l < loops; ++l) c.push_back("loop_" + std::to_string(l) + "_circ");
  for (const char* x : {"C1_trace", "C2_cLam1", "Cp_Omega", "Cp_OmegaTheta", "Cp_DPhi"}) c.push_back(x);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string e = "rho_tot_" + std::to_string(i) + std::to_string(j);
      c.push_back(e + "_re");
      if (i != j) c.push_back(e + "_im");
    }
  c.push_back("floor_hits");
  c.push_back("norm_err");
  return c;
}

std::vector<std::string> invariant_row(const DiagnosticsRecord& r, std::size_t loops, int n) {
  std::vector<std::string> v;
  for (double x : {r.t, r.dt, r.h, r.mass, r.momentum[0], r.momentum[1], r.momentum[2], r.c1_purity, r.c2_bc, r.c2_b2,
                   r.lambda1_max, r.lambda2_max, r.c3, r.purity, r.tr_rho_tot_err, r.min_d, r.min_eig_rho, r.herm_err})
    v.push_back(format_double(x));
  for (std::size_t l = 0; l < loops; ++l)
    v.push_back(format_double(l < r.loop_circulation.size() ? r.loop_circulation[l] : std::nan("")));
  for (double x : {r.c1_trace, r.c2_c_lambda1, r.cp_omega, r.cp_omega_theta, r.cp_d_phi}) v.push_back(format_double(x));
  const bool have = r.rho_tot.n() == n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      v.push_back(format_double(have ? r.rho_tot(i, j).real() : std::nan("")));
      if (i != j) v.push_back(format_double(have ? r.rho_tot(i, j).imag() : std::nan("")));
    }
  v.push_back(std::to_string(r.floor_hits));
  v.push_back(format_double(r.norm_err));
  return v;
}

InvariantsWriter::InvariantsWriter(const fs::path& path, std::size_t loops, int n)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), loops_(loops), n_(n) {
  if (!out_) fail(ErrorKind::io_error, "cannot write " + path.string());
  const auto cols = invariant_columns(loops, n);
  for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
  out_ << '\n';
  out_.flush();
}

void InvariantsWriter::write(const DiagnosticsRecord& r) {
  const auto row = invariant_row(r, loops_, n_);
  for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << row[i];
  out_ << '\n';
  out_.flush();
  if (!out_) fail(ErrorKind::io_error, "write failed on " + path_.string());
}

std::vector<std::string> snapshot_fields(const State& s) {
  std::vector<std::string> f = {"D"};
  for (int a = 0; a < s.f.u.ncomp(); ++a) f.push_back(std::string("u") + "xyz"[a]);
  const int n = s.hilbert_dim();
  if (s.mode == StateMode::density_matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const std::string e = "rho_" + std::to_string(i) + std::to_string(j);
        f.push_back(e + "_re");
        f.push_back(e + "_im");
      }
  } else {
    for (int i = 0; i < n; ++i) {
      f.push_back("psi_" + std::to_string(i) + "_re");
      f.push_back("psi_" + std::to_string(i) + "_im");
    }
  }
  if (!s.f.b.values().empty()) f.push_back("b");
  if (!s.f.c.values().empty()) f.push_back("c");
  return f;
}

std::vector<fs::path> write_snapshot(const fs::path& dir, const std::string& stem, const State& s) {
  fs::create_directories(dir);
  const Grid& g = s.grid();
  const std::size_t cells = g.size();
  const fs::path bin = dir / (stem + ".bin"), meta = dir / (stem + ".json");
  std::ofstream out(bin, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io_error, "cannot write " + bin.string());
  std::vector<double> buf(cells);
  write_le(out, s.f.d.values().data(), cells);
  for (int a = 0; a < s.f.u.ncomp(); ++a) write_le(out, s.f.u[a].values().data(), cells);
  const int n = s.hilbert_dim();
  auto emit = [&](auto&& value) {
    for (std::size_t c = 0; c < cells; ++c) buf[c] = value(c);
    write_le(out, buf.data(), cells);
  };
  if (s.mode == StateMode::density_matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        emit([&](std::size_t c) { return s.f.rho.at(c)[i * n + j].real(); });
        emit([&](std::size_t c) { return s.f.rho.at(c)[i * n + j].imag(); });
      }
  } else {
    for (int i = 0; i < n; ++i) {
      emit([&](std::size_t c) { return s.f.psi.at(c)[i].real(); });
      emit([&](std::size_t c) { return s.f.psi.at(c)[i].imag(); });
    }
  }
  if (!s.f.b.values().empty()) write_le(out, s.f.b.values().data(), cells);
  if (!s.f.c.values().empty()) write_le(out, s.f.c.values().data(), cells);
  out.close();
  if (!out) fail(ErrorKind::io_error, "write failed on " + bin.string());

  nlohmann::ordered_json m;
  m["format"] = "float64";
  m["endianness"] = "little";
  m["time"] = s.t;
  m["dim"] = g.dim();
  // row-major with x fastest: shape lists the slowest axis first
  m["shape"] = g.dim() == 3 ? std::vector<int>{g.n(2), g.n(1), g.n(0)} : std::vector<int>{g.n(1), g.n(0)};
  m["lengths"] = std::vector<double>{g.length(0), g.length(1), g.dim() == 3 ? g.length(2) : 0.0};
  m["index"] = "i + nx*(j + ny*k)";
  m["mode"] = s.mode == StateMode::pure_state ? "pure_state" : "density_matrix";
  m["hilbert_dim"] = n;
  m["b_slope"] = s.b_slope;
  m["fields"] = snapshot_fields(s);
  m["bytes_per_field"] = cells * sizeof(double);
  std::ofstream mo(meta, std::ios::binary | std::ios::trunc);
  if (!mo) fail(ErrorKind::io_error, "cannot write " + meta.string());
  mo << m.dump(2) << '\n';
  return {bin, meta};
}

std::vector<std::pair<std::string, std::vector<double>>> read_snapshot(const fs::path& bin) {
  fs::path meta = bin;
  meta.replace_extension(".json");
  std::ifstream mi(meta);
  if (!mi) fail(ErrorKind::io_error, "missing sidecar " + meta.string());
  const auto m = nlohmann::json::parse(mi);
  const auto fields = m.at("fields").get<std::vector<std::string>>();
  const auto per = m.at("bytes_per_field").get<std::size_t>() / sizeof(double);
  std::ifstream in(bin, std::ios::binary);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() != fields.size() * per * sizeof(double)) fail(ErrorKind::io_error, "snapshot size mismatch: " + bin.string());
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    std::vector<double> v(per);
    for (std::size_t c = 0; c < per; ++c) v[c] = read_le(raw.data() + (f * per + c) * sizeof(double));
    out.emplace_back(fields[f], std::move(v));
  }
  return out;
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::io_error, "cannot read " + p.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

RunManifest::RunManifest(fs::path dir, nlohmann::ordered_json config) : dir_(std::move(dir)) {
  doc_["code_version"] = code_version();
  doc_["status"] = "created";
  doc_["start_time"] = nullptr;
  doc_["end_time"] = nullptr;
  doc_["steps"] = 0;
  doc_["t_final"] = 0.0;
  doc_["message"] = "";
  doc_["config"] = std::move(config);
  doc_["files"] = nlohmann::ordered_json::array();
}

void RunManifest::start() {
  doc_["status"] = "running";
  doc_["start_time"] = now_utc();
  write();
}

void RunManifest::add_file(const fs::path& p) { files_.push_back(p); }

void RunManifest::finish(const std::string& status, const std::string& message, long long steps, double t_final) {
  doc_["status"] = status;
  doc_["end_time"] = now_utc();
  doc_["steps"] = steps;
  doc_["t_final"] = t_final;
  doc_["message"] = message;
  auto& files = doc_["files"];
  files = nlohmann::ordered_json::array();
  for (const auto& p : files_) {
    nlohmann::ordered_json e;
    e["path"] = fs::relative(p, dir_).generic_string();
    e["bytes"] = fs::file_size(p);
    e["sha256"] = sha256_file(p);
    files.push_back(e);
  }
  write();
}

void RunManifest::write() const {
  const fs::path tmp = dir_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot write " + tmp.string());
    out << doc_.dump(2) << '\n';
  }
  fs::rename(tmp, path());
}

std::string extract_series(const fs::path& csv, const std::string& quantity) {
  std::ifstream in(csv);
  if (!in) fail(ErrorKind::io_error, "cannot read " + csv.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::io_error, "empty invariants table " + csv.string());
  const auto header = split_csv(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == quantity) col = i;
  if (col == header.size()) {
    std::string msg = "unknown quantity '" + quantity + "'; available:";
    for (const auto& h : header) msg += " " + h;
    fail(ErrorKind::config_error, msg);
  }
  std::string out = "t," + quantity + "\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = split_csv(line);
    if (row.size() != header.size()) fail(ErrorKind::io_error, "ragged row in " + csv.string());
    out += row[0] + "," + row[col] + "\n";
  }
  return out;
}

}  // namespace qcf
