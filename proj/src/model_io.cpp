#include "silas/model_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace silas {

namespace {

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j) {
  const int r = static_cast<int>(j.size());
  const int c = r ? static_cast<int>(j.at(0).size()) : 0;
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < c; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from_json(const Json& j) {
  Vec v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Json poly_basis_to_json(const PolyBasis& b) {
  return Json{{"n", b.n()},
              {"degree", b.degree()},
              {"basis_kind", to_string(b.kind())},
              {"scale", mat_to_json(b.scale())},
              {"shift", vec_to_json(b.shift())}};
}

PolyBasis poly_basis_from_json(const Json& j) {
  return PolyBasis(j.at("n").get<int>(), j.at("degree").get<int>(),
                   basis_kind_from_string(j.at("basis_kind").get<std::string>()),
                   mat_from_json(j.at("scale")), vec_from_json(j.at("shift")));
}

Json poly_to_json(const Poly& p) {
  Json j = poly_basis_to_json(p.basis());
  j["coeffs"] = vec_to_json(p.coeffs());
  return j;
}

Poly poly_from_json(const Json& j) {
  return Poly(poly_basis_from_json(j), vec_from_json(j.at("coeffs")));
}

Json field_to_json(const VectorField& f) {
  Json j = poly_basis_to_json(f.basis());
  j["coeffs"] = mat_to_json(f.coeffs());
  return j;
}

VectorField field_from_json(const Json& j) {
  return VectorField(poly_basis_from_json(j), mat_from_json(j.at("coeffs")));
}

Json gram_to_json(const GramCertificate& g) {
  return Json{{"label", g.label},
              {"side", g.gram.rows()},
              {"svec", vec_to_json(svec(g.gram))},
              {"match_residual", g.match_residual},
              {"min_eig", g.min_eig},
              {"verified", g.verified}};
}

GramCertificate gram_from_json(const Json& j, int side) {
  GramCertificate g;
  g.label = j.value("label", "");
  const int stored = j.value("side", side);
  if (stored != side)
    throw std::invalid_argument("gram_from_json: side mismatch");
  g.gram = smat(vec_from_json(j.at("svec")), side);
  g.match_residual = j.at("match_residual").get<double>();
  g.min_eig = j.at("min_eig").get<double>();
  g.verified = j.at("verified").get<bool>();
  return g;
}

Json model_to_json(const LearnedModel& m) {
  const auto& c = m.certificate;
  Json cert{{"u", vec_to_json(c.u)},
            {"b", c.b},
            {"c", c.c},
            {"alpha", c.alpha},
            {"lambda", mat_to_json(c.lambda)},
            {"mu", vec_to_json(c.mu)},
            {"phi_basis", poly_basis_to_json(c.phi_basis)},
            {"theta_basis", poly_basis_to_json(c.theta_basis)},
            {"gram_lyap", gram_to_json(c.gram_lyap)},
            {"gram_coercive", gram_to_json(c.gram_coercive)},
            {"verified", c.verified}};
  const auto& h = m.hyper;
  Json hyper{{"alpha", h.alpha}, {"beta", h.beta},   {"kappa", h.kappa},
             {"eps1", h.eps1},   {"eps2", h.eps2},   {"eps3", h.eps3},
             {"eps4", h.eps4},   {"d_f", h.d_f},     {"d_v", h.d_v},
             {"K", h.max_rounds}, {"conv_tol", h.conv_tol},
             {"lambda", mat_to_json(h.lambda)}, {"mu", vec_to_json(h.mu)}};
  return Json{{"format", "silas-model-v1"},
              {"field", field_to_json(m.field)},
              {"certificate", std::move(cert)},
              {"hyperparams", std::move(hyper)},
              {"fit_rmse", m.fit_rmse},
              {"iterations_run", m.iterations_run},
              {"objective_trace", m.objective_trace},
              {"monotone_trace", m.monotone_trace},
              {"steps_verified", m.steps_verified},
              {"provenance",
               {{"dataset_hash", m.dataset_hash}, {"created_at", m.created_at}}}};
}

LearnedModel model_from_json(const Json& j) {
  if (j.value("format", "") != "silas-model-v1")
    throw std::invalid_argument("model file: unknown format tag");
  LearnedModel m;
  m.field = field_from_json(j.at("field"));
  const Json& cj = j.at("certificate");
  BoundednessCertificate c;
  c.u = vec_from_json(cj.at("u"));
  c.b = cj.at("b").get<double>();
  c.c = cj.at("c").get<double>();
  c.alpha = cj.at("alpha").get<double>();
  c.lambda = mat_from_json(cj.at("lambda"));
  c.mu = vec_from_json(cj.at("mu"));
  c.phi_basis = poly_basis_from_json(cj.at("phi_basis"));
  c.theta_basis = poly_basis_from_json(cj.at("theta_basis"));
  c.gram_lyap = gram_from_json(
      cj.at("gram_lyap"),
      c.theta_basis.with_degree(c.theta_basis.degree() / 2).size());
  c.gram_coercive = gram_from_json(
      cj.at("gram_coercive"),
      c.phi_basis.with_degree(c.phi_basis.degree() / 2).size());
  c.verified = cj.at("verified").get<bool>();
  m.certificate = std::move(c);
  const Json& hj = j.at("hyperparams");
  m.hyper.alpha = hj.at("alpha").get<double>();
  m.hyper.beta = hj.at("beta").get<double>();
  m.hyper.kappa = hj.at("kappa").get<double>();
  m.hyper.eps1 = hj.at("eps1").get<double>();
  m.hyper.eps2 = hj.at("eps2").get<double>();
  m.hyper.eps3 = hj.at("eps3").get<double>();
  m.hyper.eps4 = hj.at("eps4").get<double>();
  m.hyper.d_f = hj.at("d_f").get<int>();
  m.hyper.d_v = hj.at("d_v").get<int>();
  m.hyper.max_rounds = hj.at("K").get<int>();
  m.hyper.conv_tol = hj.at("conv_tol").get<double>();
  m.hyper.lambda = mat_from_json(hj.at("lambda"));
  m.hyper.mu = vec_from_json(hj.at("mu"));
  m.fit_rmse = j.at("fit_rmse").get<double>();
  m.iterations_run = j.at("iterations_run").get<int>();
  m.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  m.monotone_trace = j.value("monotone_trace", true);
  m.steps_verified = j.value("steps_verified", true);
  m.dataset_hash = j.at("provenance").value("dataset_hash", "");
  m.created_at = j.at("provenance").value("created_at", "");
  return m;
}

void save_model(const std::string& path, const LearnedModel& m) {
  write_text_file(path, model_to_json(m).dump(2) + "\n");
}

LearnedModel load_model(const std::string& path) {
  return model_from_json(Json::parse(read_text_file(path)));
}

ReverifyResult reverify_model(const LearnedModel& m, const VerifyOptions& opts) {
  const auto& c = m.certificate;
  ReverifyResult out;
  if (!m.field.basis().same_family(c.phi_basis))
    throw std::invalid_argument("reverify_model: field and certificate bases differ");
  const Poly v = c.lyapunov();
  const Poly coercive_target =
      v - squared_affine_norm(c.phi_basis, c.lambda, c.mu);
  out.gram_coercive = verify_certificate(
      coercive_target, c.phi_basis.with_degree(c.phi_basis.degree() / 2),
      c.gram_coercive.gram, opts, "coercive");

  const Poly lie = lie_derivative(m.field, v);
  const Poly target = Poly::constant(c.theta_basis, c.b) -
                      change_basis(v, c.theta_basis) * c.c -
                      change_basis(lie, c.theta_basis) * c.alpha;
  out.gram_lyap = verify_certificate(
      target, c.theta_basis.with_degree(c.theta_basis.degree() / 2),
      c.gram_lyap.gram, opts, "lyapunov");

  const bool box_ok = c.c >= -1e-12 && c.c <= 1.0 + 1e-12 &&
                      std::abs(c.b) <= m.hyper.beta * c.c + 1e-9 * (1 + m.hyper.beta);
  out.verified = out.gram_coercive.verified && out.gram_lyap.verified && box_ok;
  return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& t) {
  std::ostringstream os;
  os << "t";
  for (int j = 0; j < t.dim(); ++j) os << ",x" << (j + 1);
  os << "\n";
  for (int i = 0; i < t.size(); ++i) {
    os << fmt_double(t.times(i));
    for (int j = 0; j < t.dim(); ++j) os << "," << fmt_double(t.states(i, j));
    os << "\n";
  }
  write_text_file(path, os.str());
}

namespace {
std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               std::string* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (header) *header = line;
      if (!line.empty() && (std::isalpha(line[0]) || line[0] == '#')) continue;
      if (header) *header = "";
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}
}  // namespace

Trajectory read_trajectory_csv(const std::string& path) {
  std::string header;
  auto rows = read_csv_rows(path, &header);
  if (rows.empty()) throw std::runtime_error("empty trajectory file " + path);
  const int n = static_cast<int>(rows[0].size()) - 1;
  Trajectory t;
  t.times.resize(rows.size());
  t.states.resize(static_cast<long>(rows.size()), n);
  for (size_t i = 0; i < rows.size(); ++i) {
    t.times(static_cast<long>(i)) = rows[i][0];
    for (int j = 0; j < n; ++j) t.states(static_cast<long>(i), j) = rows[i][j + 1];
  }
  return t;
}

void write_dataset_csv(const std::string& path, const Dataset& d) {
  std::ostringstream os;
  for (int j = 0; j < d.dim(); ++j) os << "x" << (j + 1) << ",";
  for (int j = 0; j < d.dim(); ++j) os << "y" << (j + 1) << ",";
  os << "w\n";
  for (int i = 0; i < d.size(); ++i) {
    for (int j = 0; j < d.dim(); ++j) os << fmt_double(d.x(i, j)) << ",";
    for (int j = 0; j < d.dim(); ++j) os << fmt_double(d.y(i, j)) << ",";
    os << fmt_double(d.w(i)) << "\n";
  }
  write_text_file(path, os.str());
}

Dataset read_dataset_csv(const std::string& path) {
  std::string header;
  auto rows = read_csv_rows(path, &header);
  if (rows.empty()) throw std::runtime_error("empty dataset file " + path);
  const int n = static_cast<int>((rows[0].size() - 1) / 2);
  if (rows[0].size() != static_cast<size_t>(2 * n + 1))
    throw std::runtime_error("dataset file has malformed columns: " + path);
  Mat x(rows.size(), n), y(rows.size(), n);
  Vec w(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < n; ++j) {
      x(static_cast<long>(i), j) = rows[i][j];
      y(static_cast<long>(i), j) = rows[i][n + j];
    }
    w(static_cast<long>(i)) = rows[i][2 * n];
  }
  return Dataset(std::move(x), std::move(y), std::move(w));
}

void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::string& header) {
  std::ostringstream os;
  if (!header.empty()) os << header << "\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j)
      os << (j ? "," : "") << fmt_double(m(i, j));
    os << "\n";
  }
  write_text_file(path, os.str());
}

Mat read_matrix_csv(const std::string& path) {
  std::string header;
  auto rows = read_csv_rows(path, &header);
  if (rows.empty()) return Mat(0, 0);
  Mat m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
  return m;
}

void write_snapshots(const std::string& path, const SnapshotMatrix& s) {
  Json header{{"grid", std::vector<double>(s.grid.data(), s.grid.data() + s.grid.size())},
              {"times", std::vector<double>(s.times.data(), s.times.data() + s.times.size())},
              {"fields", {"r", "s"}}};
  const std::string htext = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write("SILASNAP", 8);
  const std::uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&hlen), 8);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  const int ng = s.grid_size();
  for (int j = 0; j < s.count(); ++j) {
    out.write(reinterpret_cast<const char*>(s.r.col(j).data()),
              static_cast<std::streamsize>(ng * sizeof(double)));
    out.write(reinterpret_cast<const char*>(s.s.col(j).data()),
              static_cast<std::streamsize>(ng * sizeof(double)));
  }
}

SnapshotMatrix read_snapshots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::string(magic, 8) != "SILASNAP")
    throw std::runtime_error("not a snapshot file: " + path);
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  const Json header = Json::parse(htext);
  SnapshotMatrix s;
  const auto grid = header.at("grid").get<std::vector<double>>();
  const auto times = header.at("times").get<std::vector<double>>();
  s.grid = Eigen::Map<const Vec>(grid.data(), static_cast<long>(grid.size()));
  s.times = Eigen::Map<const Vec>(times.data(), static_cast<long>(times.size()));
  const int ng = s.grid_size();
  s.r.resize(ng, s.count());
  s.s.resize(ng, s.count());
  for (int j = 0; j < s.count(); ++j) {
    in.read(reinterpret_cast<char*>(s.r.col(j).data()),
            static_cast<std::streamsize>(ng * sizeof(double)));
    in.read(reinterpret_cast<char*>(s.s.col(j).data()),
            static_cast<std::streamsize>(ng * sizeof(double)));
  }
  if (!in) throw std::runtime_error("truncated snapshot file: " + path);
  return s;
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string file_hash_hex(const std::string& path) {
  const std::string text = read_text_file(path);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(text.data(), text.size()));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

}  // namespace silas
