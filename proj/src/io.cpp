#include "shilov/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace shilov::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + " must be a number");
  return j.get<double>();
}

Json status_list(const std::vector<Index>& v, const WitnessFamily& W) {
  Json out = Json::array();
  for (Index i : v) out.push_back(W.candidates[i]);
  return out;
}

Json index_list(const std::vector<Index>& v) {
  Json out = Json::array();
  for (Index i : v) out.push_back(i);
  return out;
}

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const VectorXc& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const MatrixXc& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(VectorXc(m.row(i).transpose())));
  return out;
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

VectorXc vector_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of complex numbers");
  VectorXc v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

MatrixXc matrix_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("expected a matrix as an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows == 0 ? 0 : static_cast<Index>(j[0].size());
  MatrixXc m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const VectorXc r = vector_from_json(j[i]);
    if (r.size() != cols) throw FormatError("matrix rows differ in length");
    m.row(i) = r.transpose();
  }
  return m;
}

Json to_json(const Algebra& E) {
  const Index n = E.dim();
  Json structure = Json::array();
  for (Index i = 0; i < n; ++i) {
    Json row = Json::array();
    for (Index j = 0; j < n; ++j) row.push_back(to_json(VectorXc(E.left[i].col(j))));
    structure.push_back(row);
  }
  Json weights = Json::array();
  for (Index i = 0; i < n; ++i) weights.push_back(E.weights(i));
  return {{"dim", n}, {"structure", structure}, {"unit", to_json(E.unit)}, {"weights", weights}, {"label", E.label}};
}

Algebra algebra_from_json(const Json& j) {
  if (j.is_string()) {
    try {
      return preset_algebra<double>(j.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
  }
  const Json& s = field(j, "structure");
  if (!s.is_array()) throw FormatError("structure must be a nested array");
  std::vector<std::vector<VectorXc>> c;
  for (const auto& row : s) {
    if (!row.is_array()) throw FormatError("structure must be a nested array");
    std::vector<VectorXc> r;
    for (const auto& fiber : row) r.push_back(vector_from_json(fiber));
    c.push_back(std::move(r));
  }
  const Json& w = field(j, "weights");
  if (!w.is_array()) throw FormatError("weights must be an array");
  Eigen::VectorXd weights(static_cast<Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) weights(static_cast<Index>(i)) = number(w[i], "weight");
  const VectorXc unit = vector_from_json(field(j, "unit"));
  if (j.contains("dim") && j.at("dim") != static_cast<Index>(c.size())) throw FormatError("dim disagrees with structure");
  if (unit.size() != static_cast<Index>(c.size()) || weights.size() != static_cast<Index>(c.size()))
    throw FormatError("unit and weights need one entry per basis vector");
  try {
    return algebra_from_tensor<double>(c, unit, weights, j.value("label", std::string("custom")));
  } catch (const DimensionMismatch& e) {
    throw FormatError(e.what());
  }
}

Json characters_to_json(const Algebra& E, const std::vector<Character<double>>& chars) {
  Json list = Json::array();
  for (const auto& chi : chars) list.push_back({{"label", chi.label}, {"values", to_json(chi.values)}});
  return {{"algebra", E.label}, {"characters", list}};
}

Json to_json(const FiniteSpace& X) {
  Json j{{"points", X.labels}};
  if (X.coords) {
    Json c = Json::array();
    for (cplx z : *X.coords) c.push_back(to_json(z));
    j["coords"] = c;
  }
  if (X.metric) {
    Json m = Json::array();
    for (Index i = 0; i < X.metric->rows(); ++i) {
      Json row = Json::array();
      for (Index k = 0; k < X.metric->cols(); ++k) row.push_back((*X.metric)(i, k));
      m.push_back(row);
    }
    j["metric"] = m;
  }
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  FiniteSpace X;
  if (j.contains("coords")) {
    const Json& c = j.at("coords");
    if (!c.is_array()) throw FormatError("coords must be an array of [re, im]");
    std::vector<cplx> z;
    for (const auto& p : c) z.push_back(complex_from_json(p));
    X = make_planar_space(z);
  }
  if (j.contains("metric")) {
    const Json& m = j.at("metric");
    if (!m.is_array()) throw FormatError("metric must be a square array");
    const Index n = static_cast<Index>(m.size());
    Eigen::MatrixXd d(n, n);
    for (Index i = 0; i < n; ++i) {
      if (!m[i].is_array() || static_cast<Index>(m[i].size()) != n) throw FormatError("metric must be square");
      for (Index k = 0; k < n; ++k) d(i, k) = number(m[i][k], "metric entry");
    }
    if (X.coords && X.size() != n) throw FormatError("metric and coords disagree on the number of points");
    if (X.coords)
      X.metric = d;
    else
      X = make_metric_space(d);
  }
  if (j.contains("points")) {
    const auto labels = j.at("points").get<std::vector<std::string>>();
    if (!X.coords && !X.metric) {
      X.labels = labels;
    } else {
      if (static_cast<Index>(labels.size()) != X.size()) throw FormatError("points and coords disagree in length");
      X.labels = labels;
    }
  }
  if (X.size() == 0) throw FormatError("space has no points");
  return X;
}

Json to_json(const FunctionSystem& S) {
  Json basis = Json::array();
  for (Index j = 0; j < S.dim(); ++j) basis.push_back(to_json(MatrixXc(S.table(j))));
  Json norm = S.norm.kind == NormTag::Kind::sup ? Json("sup") : Json{{"lipschitz", S.norm.alpha}};
  return {{"space", to_json(S.space)}, {"algebra", to_json(S.scalars)}, {"basis", basis},
          {"norm", norm}, {"closed", S.closed}, {"label", S.label}};
}

FunctionSystem system_from_json(const Json& j) {
  const FiniteSpace X = space_from_json(field(j, "space"));
  const Algebra E = algebra_from_json(field(j, "algebra"));
  std::vector<ValueTable> tables;
  for (const auto& t : field(j, "basis")) tables.push_back(matrix_from_json(t));
  NormTag norm;
  if (j.contains("norm")) {
    const Json& n = j.at("norm");
    if (n.is_object())
      norm = NormTag::lipschitz(number(field(n, "lipschitz"), "lipschitz exponent"));
    else if (n != "sup")
      throw FormatError("norm must be \"sup\" or {\"lipschitz\": alpha}");
  }
  return make_system(X, E, tables, norm, j.value("closed", false), j.value("label", std::string()));
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"detail", c.detail}});
  return {{"subject", r.subject}, {"passed", r.passed()}, {"checks", checks}};
}

Json to_json(const WitnessFamily& W) {
  return {{"label", W.label}, {"candidates", W.candidates}, {"values", to_json(W.values)}};
}

WitnessFamily witness_family_from_json(const Json& j) {
  const MatrixXc V = matrix_from_json(field(j, "values"));
  std::vector<std::string> candidates;
  if (j.contains("candidates"))
    candidates = j.at("candidates").get<std::vector<std::string>>();
  else
    for (Index i = 0; i < V.rows(); ++i) candidates.push_back("p" + std::to_string(i));
  try {
    return make_witness_family(std::move(candidates), V, j.value("label", std::string()));
  } catch (const DimensionMismatch& e) {
    throw FormatError(e.what());
  }
}

Json to_json(const PeakCertificate& c, const WitnessFamily& W) {
  return {{"target", c.target},
          {"candidate", W.candidates[c.target]},
          {"status", to_string(c.status)},
          {"coefficients", to_json(c.coefficients)},
          {"separation", c.separation},
          {"lp_lower", c.lp_lower},
          {"lp_upper", c.lp_upper},
          {"lower", c.lower},
          {"upper", c.upper}};
}

Json to_json(const ShilovEstimate& est, const WitnessFamily& W) {
  Json certs = Json::array();
  for (const auto& c : est.certificates) certs.push_back(to_json(c, W));
  return {{"family", to_json(W)},
          {"certificates", certs},
          {"peaks", status_list(est.peaks, W)},
          {"not_peaks", status_list(est.not_peaks, W)},
          {"undecided", status_list(est.undecided, W)}};
}

Json to_json(const ProductReport& r) {
  auto labels = [&](const std::vector<Index>& v) {
    Json out = Json::array();
    for (Index i : v) out.push_back(i < static_cast<Index>(r.candidates.size()) ? r.candidates[i] : std::to_string(i));
    return out;
  };
  return {{"theorem", r.theorem},
          {"quadruple", r.quadruple},
          {"regime", to_string(r.regime)},
          {"preconditions_ok", r.preconditions_ok},
          {"notes", r.notes},
          {"candidates", r.candidates},
          {"set_E", index_list(r.set_E)},
          {"set_B", index_list(r.set_B)},
          {"certified", labels(r.certified)},
          {"expected", labels(r.expected)},
          {"missing", labels(r.missing)},
          {"extra", labels(r.extra)},
          {"undecided", labels(r.undecided)},
          {"gamma_equals_s0", r.gamma_equals_s0},
          {"coverage", r.coverage},
          {"passed", r.passed}};
}

Json to_json(const ProductPeaker& g) {
  return {{"g", to_json(MatrixXc(g.g))},
          {"in_span", g.in_span},
          {"coefficients", to_json(g.coefficients)},
          {"gelfand_values", to_json(g.gelfand_values)},
          {"law_residual", g.law_residual},
          {"max_modulus", g.max_modulus},
          {"argmax", index_list(g.argmax)}};
}

// ---------------------------------------------------------------- rasters

std::string pgm(const Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>& gray, int maxval) {
  std::ostringstream os;
  os << "P2\n" << gray.cols() << ' ' << gray.rows() << '\n' << maxval << '\n';
  for (Index r = gray.rows() - 1; r >= 0; --r) {
    for (Index c = 0; c < gray.cols(); ++c) os << (c ? " " : "") << gray(r, c);
    os << '\n';
  }
  return os.str();
}

std::string raster_pgm(const RasterRegion& R) {
  return pgm(R.grid.cast<int>() * 255);
}

Json raster_sidecar(const RasterRegion& R) {
  return {{"origin", to_json(R.origin)}, {"pixel_size", R.pixel_size}};
}

RasterRegion raster_from_pgm(const std::string& pgm_text, const Json& sidecar) {
  std::istringstream is(pgm_text);
  std::string magic;
  Index cols = 0, rows = 0;
  int maxval = 0;
  if (!(is >> magic >> cols >> rows >> maxval) || magic != "P2" || cols <= 0 || rows <= 0 || maxval <= 0)
    throw FormatError("not a plain PGM (P2) image");
  RasterRegion R;
  R.grid = Bitmap::Zero(rows, cols);
  for (Index r = rows - 1; r >= 0; --r)
    for (Index c = 0; c < cols; ++c) {
      int v = 0;
      if (!(is >> v)) throw FormatError("PGM pixel data truncated");
      R.grid(r, c) = v > 0 ? 1 : 0;
    }
  R.origin = complex_from_json(field(sidecar, "origin"));
  R.pixel_size = number(field(sidecar, "pixel_size"), "pixel_size");
  return R;
}

std::string status_overlay_pgm(const RasterRegion& R, const std::vector<cplx>& points,
                               const std::vector<PeakStatus>& status) {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic> gray =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>::Constant(R.rows(), R.cols(), kOverlayNotPeak);
  for (std::size_t i = 0; i < points.size() && i < status.size(); ++i) {
    const auto [r, c] = R.nearest_pixel(points[i]);
    if (r < 0 || c < 0 || r >= R.rows() || c >= R.cols()) continue;
    const int level = status[i] == PeakStatus::certified_peak ? kOverlayPeak
                      : status[i] == PeakStatus::undecided    ? kOverlayUndecided
                                                              : kOverlayNotPeak;
    gray(r, c) = std::max(gray(r, c), level);
  }
  return pgm(gray);
}

namespace {
std::string fixed(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace

std::string status_csv(const std::vector<cplx>& points, const std::vector<PeakStatus>& status) {
  std::string out = "x,y,status\n";
  for (std::size_t i = 0; i < points.size() && i < status.size(); ++i)
    out += fixed(points[i].real()) + "," + fixed(points[i].imag()) + "," + to_string(status[i]) + "\n";
  return out;
}

std::string points_csv(const std::vector<cplx>& points) {
  std::string out = "x,y\n";
  for (cplx z : points) out += fixed(z.real()) + "," + fixed(z.imag()) + "\n";
  return out;
}

// ---------------------------------------------------------------- files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace shilov::io
