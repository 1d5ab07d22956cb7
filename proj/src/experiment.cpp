#include "shilov/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

namespace shilov {

using io::Json;

namespace {

const std::set<std::string> kTopLevel = {"description", "seed",    "output_dir", "algebras",
                                         "rasters",     "spaces",  "systems",    "quadruples", "run"};
const std::set<std::string> kSystemKinds = {"CXE", "lip", "poly", "rational", "span_BE", "explicit"};
const std::set<std::string> kCommands = {"characters", "validate",     "hull",       "shilov",
                                         "verify-product", "verify-peaks", "peaker"};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool is_preset(const std::string& name) {
  try {
    preset_algebra<double>(name);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool positive_number(const Json& j) { return j.is_number() && j.get<double>() > 0; }
bool positive_integer(const Json& j) { return j.is_number_integer() && j.get<long long>() > 0; }

bool is_point(const Json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

Shape shape_from_json(const Json& j) {
  Shape shape;
  for (const auto& part : j) {
    if (part.contains("disk")) {
      const Json& d = part.at("disk");
      shape.push_back(Disk{io::complex_from_json(d.at("center")), d.at("radius").get<double>()});
    } else {
      const Json& a = part.at("annulus");
      shape.push_back(Annulus{io::complex_from_json(a.at("center")), a.at("inner").get<double>(),
                              a.at("outer").get<double>()});
    }
  }
  return shape;
}

// Collects problems by category while walking the document.
struct ConfigChecker {
  const Json& doc;
  std::vector<std::string> schema, references, shapes;

  bool has(const char* section, const Json& ref) const {
    return ref.is_string() && doc.contains(section) && doc.at(section).is_object() &&
           doc.at(section).contains(ref.get<std::string>());
  }

  void require_ref(const char* section, const Json& owner, const char* key, const std::string& where) {
    if (!owner.contains(key)) {
      schema.push_back(where + ": missing \"" + key + "\"");
      return;
    }
    const Json& ref = owner.at(key);
    if (!ref.is_string()) {
      schema.push_back(where + ": \"" + key + "\" must be a name");
      return;
    }
    if (!has(section, ref))
      references.push_back(where + ": unknown " + std::string(section).substr(0, std::string(section).size() - 1) +
                           " '" + ref.get<std::string>() + "'");
  }

  void require_algebra(const Json& owner, const char* key, const std::string& where) {
    if (!owner.contains(key)) {
      schema.push_back(where + ": missing \"" + key + "\"");
      return;
    }
    const Json& ref = owner.at(key);
    if (!ref.is_string()) {
      schema.push_back(where + ": \"" + key + "\" must be a name");
      return;
    }
    if (!has("algebras", ref) && !is_preset(ref.get<std::string>()))
      references.push_back(where + ": unknown algebra '" + ref.get<std::string>() + "'");
  }

  void require(bool ok, const std::string& message) {
    if (!ok) schema.push_back(message);
  }

  void top_level() {
    for (const auto& [key, value] : doc.items()) require(kTopLevel.count(key) > 0, "unknown top-level key \"" + key + "\"");
    if (doc.contains("seed")) require(doc.at("seed").is_number_unsigned(), "seed must be an unsigned 64-bit integer");
    if (doc.contains("output_dir")) require(doc.at("output_dir").is_string(), "output_dir must be a string");
    for (const char* s : {"algebras", "rasters", "spaces", "systems", "quadruples"})
      if (doc.contains(s)) require(doc.at(s).is_object(), std::string(s) + " must be an object of named entries");
    require(doc.contains("run") && doc.at("run").is_array(), "run must be an array of commands");
  }

  template <typename F>
  void each(const char* section, F&& f) {
    if (!doc.contains(section) || !doc.at(section).is_object()) return;
    for (const auto& [name, entry] : doc.at(section).items()) f(std::string(section) + "." + name, name, entry);
  }

  void algebras() {
    each("algebras", [&](const std::string& where, const std::string&, const Json& e) {
      try {
        io::algebra_from_json(e);
      } catch (const Error& ex) {
        schema.push_back(where + ": " + ex.what());
      }
    });
  }

  void rasters() {
    each("rasters", [&](const std::string& where, const std::string& name, const Json& e) {
      if (!e.is_object() || !e.contains("shape") || !e.at("shape").is_array() || e.at("shape").empty()) {
        schema.push_back(where + ": needs a nonempty \"shape\" list");
        return;
      }
      require(e.contains("resolution") && positive_number(e.at("resolution")), where + ": resolution must be positive");
      bool ok = true;
      for (const auto& part : e.at("shape")) {
        if (part.is_object() && part.size() == 1 && part.contains("disk")) {
          const Json& d = part.at("disk");
          ok = ok && d.is_object() && d.contains("center") && is_point(d.at("center")) && d.contains("radius") &&
               d.at("radius").is_number();
        } else if (part.is_object() && part.size() == 1 && part.contains("annulus")) {
          const Json& a = part.at("annulus");
          ok = ok && a.is_object() && a.contains("center") && is_point(a.at("center")) && a.contains("inner") &&
               a.at("inner").is_number() && a.contains("outer") && a.at("outer").is_number();
        } else {
          ok = false;
        }
      }
      if (!ok) {
        schema.push_back(where + ": shape parts are {\"disk\": {center, radius}} or {\"annulus\": {center, inner, outer}}");
        return;
      }
      const std::string problem = shape_problem(shape_from_json(e.at("shape")));
      if (!problem.empty()) shapes.push_back("raster '" + name + "': " + problem);
    });
  }

  void spaces() {
    each("spaces", [&](const std::string& where, const std::string&, const Json& e) {
      if (!e.is_object()) {
        schema.push_back(where + ": must be an object");
        return;
      }
      if (e.contains("random")) {
        require(positive_integer(e.at("random")), where + ": random needs a positive point count");
      } else if (e.contains("raster")) {
        require_ref("rasters", e, "raster", where);
        if (!e.contains("sample") || !e.at("sample").is_array() || e.at("sample").empty()) {
          schema.push_back(where + ": needs a nonempty \"sample\" list");
          return;
        }
        for (const auto& s : e.at("sample")) {
          bool ok = false;
          if (s.is_object() && s.size() == 1) {
            if (s.contains("circle")) {
              const Json& c = s.at("circle");
              ok = c.is_object() && c.contains("center") && is_point(c.at("center")) && c.contains("radius") &&
                   positive_number(c.at("radius")) && c.contains("n") && positive_integer(c.at("n"));
            } else if (s.contains("interior_grid")) {
              ok = positive_number(s.at("interior_grid"));
            } else if (s.contains("boundary_uniform")) {
              ok = positive_integer(s.at("boundary_uniform"));
            }
          }
          require(ok, where + ": sample strategies are {\"circle\": {center, radius, n}}, {\"interior_grid\": step} "
                              "or {\"boundary_uniform\": n}");
        }
      } else {
        try {
          io::space_from_json(e);
        } catch (const std::exception& ex) {
          schema.push_back(where + ": " + ex.what());
        }
      }
    });
  }

  void systems() {
    each("systems", [&](const std::string& where, const std::string&, const Json& e) {
      if (!e.is_object() || !e.contains("kind") || !e.at("kind").is_string() ||
          !kSystemKinds.count(e.at("kind").get<std::string>())) {
        schema.push_back(where + ": kind must be one of CXE, lip, poly, rational, span_BE, explicit");
        return;
      }
      const std::string kind = e.at("kind");
      if (kind == "span_BE") {
        require_ref("systems", e, "scalar", where);
        require_algebra(e, "algebra", where);
        return;
      }
      require_ref("spaces", e, "space", where);
      require_algebra(e, "algebra", where);
      if (kind == "lip") require(e.contains("alpha") && positive_number(e.at("alpha")), where + ": lip needs alpha > 0");
      if (kind == "poly" || kind == "rational")
        require(e.contains("degree") && e.at("degree").is_number_integer() && e.at("degree").get<long long>() >= 0,
                where + ": " + kind + " needs an integer degree >= 0");
      if (kind == "rational") {
        bool ok = e.contains("poles") && e.at("poles").is_array();
        if (ok)
          for (const auto& p : e.at("poles")) ok = ok && is_point(p);
        require(ok, where + ": rational needs poles as [re, im] pairs");
      }
      if (kind == "explicit") {
        bool ok = e.contains("basis") && e.at("basis").is_array() && !e.at("basis").empty();
        if (ok) {
          try {
            for (const auto& t : e.at("basis")) io::matrix_from_json(t);
          } catch (const std::exception&) {
            ok = false;
          }
        }
        require(ok, where + ": explicit needs a nonempty basis of value tables");
      }
    });
  }

  void quadruples() {
    each("quadruples", [&](const std::string& where, const std::string&, const Json& e) {
      if (!e.is_object()) {
        schema.push_back(where + ": must be an object");
        return;
      }
      require_ref("spaces", e, "space", where);
      require_algebra(e, "algebra", where);
      require_ref("systems", e, "scalar_system", where);
      require_ref("systems", e, "vector_system", where);
    });
  }

  void numeric_options(const Json& c, const std::string& where) {
    if (c.contains("tol")) require(positive_number(c.at("tol")), where + ": tol must be positive");
    if (c.contains("m"))
      require(c.at("m").is_number_integer() && c.at("m").get<long long>() >= 8, where + ": m must be an integer >= 8");
    if (c.contains("early_stop")) require(c.at("early_stop").is_boolean(), where + ": early_stop must be a boolean");
  }

  void run() {
    if (!doc.contains("run") || !doc.at("run").is_array()) return;
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc.at("run").size(); ++i) {
      const Json& c = doc.at("run")[i];
      const std::string where = "run[" + std::to_string(i) + "]";
      if (!c.is_object() || !c.contains("command") || !c.at("command").is_string() ||
          !kCommands.count(c.at("command").get<std::string>())) {
        schema.push_back(where + ": command must be one of characters, validate, hull, shilov, verify-product, "
                                 "verify-peaks, peaker");
        continue;
      }
      if (c.contains("name") && !c.at("name").is_string()) schema.push_back(where + ": name must be a string");
      const std::string cmd = c.at("command");
      numeric_options(c, where);
      if (cmd == "characters") {
        require_algebra(c, "algebra", where);
      } else if (cmd == "validate") {
        if (c.contains("algebra"))
          require_algebra(c, "algebra", where);
        else if (c.contains("system"))
          require_ref("systems", c, "system", where);
        else if (c.contains("quadruple"))
          require_ref("quadruples", c, "quadruple", where);
        else
          schema.push_back(where + ": validate needs an algebra, system or quadruple");
      } else if (cmd == "hull") {
        require_ref("rasters", c, "raster", where);
      } else if (cmd == "shilov") {
        if (c.contains("system")) {
          require_ref("systems", c, "system", where);
        } else if (c.contains("witness")) {
          try {
            const Json& w = c.at("witness");
            const WitnessFamily W = io::witness_family_from_json(w);
            if (w.contains("points")) {
              require(w.at("points").is_array() && static_cast<Index>(w.at("points").size()) == W.size(),
                      where + ": witness points need one [re, im] per candidate");
              for (const auto& p : w.at("points")) require(is_point(p), where + ": witness points are [re, im] pairs");
            }
          } catch (const std::exception& ex) {
            schema.push_back(where + ": witness: " + ex.what());
          }
        } else {
          schema.push_back(where + ": shilov needs a system or an inline witness family");
        }
        if (c.contains("raster")) require_ref("rasters", c, "raster", where);
      } else {
        require_ref("quadruples", c, "quadruple", where);
        if (c.contains("regime"))
          require(c.at("regime") == "exact" || c.at("regime") == "estimation",
                  where + ": regime must be \"exact\" or \"estimation\"");
        if (cmd == "peaker") {
          const bool ok = c.contains("target") && c.at("target").is_object() && c.at("target").contains("character") &&
                          c.at("target").contains("point");
          require(ok, where + ": peaker needs target {\"character\", \"point\"}");
        }
      }
      const std::string name = command_name(c);
      if (!names.insert(name).second) schema.push_back(where + ": duplicate output name '" + name + "'");
    }
  }
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

CertifyOptions options_from(const Json& c) {
  CertifyOptions o;
  o.tol = c.value("tol", o.tol);
  o.sides = c.value("m", o.sides);
  o.early_stop = c.value("early_stop", o.early_stop);
  return o;
}

Json options_json(const CertifyOptions& o) {
  return {{"tol", o.tol}, {"m", o.sides}, {"early_stop", o.early_stop}};
}

std::uint64_t mix(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return seed ^ h;
}

FiniteSpace random_space(Index n, std::uint64_t seed) {
  // SplitMix64: the stream is fixed across standard libraries.
  std::uint64_t s = seed;
  auto next = [&s]() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  auto unit = [&]() { return static_cast<double>(next() >> 11) * 0x1p-53; };
  std::vector<cplx> pts;
  for (Index i = 0; i < n; ++i) {
    const double re = unit();
    pts.emplace_back(re, unit());
  }
  return make_planar_space(std::move(pts));
}

std::vector<PeakStatus> statuses(const ShilovEstimate& est) {
  std::vector<PeakStatus> s;
  for (const auto& c : est.certificates) s.push_back(c.status);
  return s;
}

Index resolve_index(const Json& ref, const std::vector<std::string>& labels, const std::string& what) {
  if (ref.is_number_integer()) {
    const auto i = ref.get<long long>();
    if (i < 0 || i >= static_cast<long long>(labels.size()))
      throw InvalidArgument(what + " index " + std::to_string(i) + " out of range");
    return static_cast<Index>(i);
  }
  if (ref.is_string()) {
    const auto it = std::find(labels.begin(), labels.end(), ref.get<std::string>());
    if (it == labels.end()) throw InvalidArgument("unknown " + what + " '" + ref.get<std::string>() + "'");
    return static_cast<Index>(it - labels.begin());
  }
  throw InvalidArgument(what + " must be an index or a label");
}

}  // namespace

std::string command_name(const Json& c) {
  if (c.contains("name") && c.at("name").is_string()) return c.at("name");
  std::string name = c.value("command", std::string("command"));
  for (const char* key : {"algebra", "system", "quadruple", "raster"})
    if (c.contains(key) && c.at(key).is_string()) return name + "_" + c.at(key).get<std::string>();
  return name;
}

ValidationReport validate_config_json(const Json& doc) {
  ValidationReport rep;
  rep.subject = "config";
  rep.add("parse", true);
  if (!doc.is_object()) {
    rep.add("schema", false, 0.0, "config must be a JSON object");
    return rep;
  }
  ConfigChecker c{doc, {}, {}, {}};
  c.top_level();
  c.algebras();
  c.rasters();
  c.spaces();
  c.systems();
  c.quadruples();
  c.run();
  rep.add("schema", c.schema.empty(), static_cast<double>(c.schema.size()), join(c.schema));
  rep.add("references", c.references.empty(), static_cast<double>(c.references.size()), join(c.references));
  rep.add("shapes", c.shapes.empty(), static_cast<double>(c.shapes.size()), join(c.shapes));
  return rep;
}

ValidationReport validate_config_text(const std::string& text) {
  try {
    return validate_config_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    ValidationReport rep;
    rep.subject = "config";
    std::string msg = e.what();
    const auto colon = msg.rfind(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    rep.add("parse", false, static_cast<double>(e.byte), "parse error at " + line_column(text, e.byte) + ": " + msg);
    return rep;
  }
}

ValidationReport validate_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    ValidationReport rep;
    rep.subject = "config";
    rep.add("parse", false, 0.0, e.what());
    return rep;
  }
  return validate_config_text(text);
}

ExperimentConfig load_config_text(const std::string& text) {
  ValidationReport rep = validate_config_text(text);
  if (!rep.passed()) {
    std::string what = "invalid config";
    for (const auto& c : rep.checks)
      if (!c.passed) {
        what += ": " + c.detail;
        break;
      }
    throw ConfigError(what, std::move(rep));
  }
  ExperimentConfig cfg;
  cfg.doc = Json::parse(text);
  cfg.seed = cfg.doc.value("seed", std::uint64_t{0});
  cfg.output_dir = cfg.doc.value("output_dir", std::string("out"));
  cfg.hash = io::fnv1a_hex(cfg.doc.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    ValidationReport rep;
    rep.subject = "config";
    rep.add("parse", false, 0.0, e.what());
    throw ConfigError(e.what(), std::move(rep));
  }
  return load_config_text(text);
}

// ---------------------------------------------------------------- objects

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {}

const Json& Experiment::section(const char* key, const std::string& name) const {
  const Json& doc = config_.doc;
  if (!doc.contains(key) || !doc.at(key).contains(name)) {
    ValidationReport rep;
    rep.subject = "config";
    rep.add("references", false, 1.0, std::string("unknown ") + key + " entry '" + name + "'");
    throw ConfigError(rep.checks.back().detail, rep);
  }
  return doc.at(key).at(name);
}

Algebra Experiment::algebra(const std::string& name) {
  if (auto it = algebras_.find(name); it != algebras_.end()) return it->second;
  Algebra E;
  const Json& doc = config_.doc;
  if (doc.contains("algebras") && doc.at("algebras").contains(name)) {
    E = io::algebra_from_json(doc.at("algebras").at(name));
    if (E.label.empty() || E.label == "custom") E.label = name;
  } else {
    try {
      E = preset_algebra<double>(name);
    } catch (const InvalidArgument&) {
      section("algebras", name);
    }
  }
  return algebras_.emplace(name, E).first->second;
}

RasterRegion Experiment::raster(const std::string& name) {
  if (auto it = rasters_.find(name); it != rasters_.end()) return it->second;
  const Json& e = section("rasters", name);
  return rasters_.emplace(name, raster_from_shape(shape_from_json(e.at("shape")), e.at("resolution").get<double>()))
      .first->second;
}

FiniteSpace Experiment::space(const std::string& name) {
  if (auto it = spaces_.find(name); it != spaces_.end()) return it->second;
  const Json& e = section("spaces", name);
  FiniteSpace X;
  if (e.contains("random")) {
    X = random_space(e.at("random").get<Index>(), mix(config_.seed, name));
  } else if (e.contains("raster")) {
    const RasterRegion R = raster(e.at("raster"));
    std::vector<std::string> labels;
    std::vector<cplx> coords;
    const Json& samples = e.at("sample");
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const Json& s = samples[k];
      SampleStrategy strategy;
      std::string tag;
      if (s.contains("circle")) {
        const Json& c = s.at("circle");
        strategy = CircleSample{io::complex_from_json(c.at("center")), c.at("radius").get<double>(), c.at("n").get<Index>()};
        tag = "c";
      } else if (s.contains("interior_grid")) {
        strategy = InteriorGrid{s.at("interior_grid").get<double>()};
        tag = "g";
      } else {
        strategy = BoundaryUniform{s.at("boundary_uniform").get<Index>()};
        tag = "b";
      }
      const FiniteSpace part = sample_raster(R, strategy);
      for (Index i = 0; i < part.size(); ++i) {
        labels.push_back(tag + std::to_string(k) + "_" + std::to_string(i));
        coords.push_back((*part.coords)[static_cast<std::size_t>(i)]);
      }
    }
    X = make_planar_space(std::move(coords));
    X.labels = std::move(labels);
  } else {
    X = io::space_from_json(e);
  }
  return spaces_.emplace(name, X).first->second;
}

FunctionSystem Experiment::system(const std::string& name) {
  if (auto it = systems_.find(name); it != systems_.end()) return it->second;
  const Json& e = section("systems", name);
  const std::string kind = e.at("kind");
  FunctionSystem S;
  if (kind == "span_BE") {
    S = span_BE(system(e.at("scalar")), algebra(e.at("algebra")));
  } else {
    const FiniteSpace X = space(e.at("space"));
    const Algebra E = algebra(e.at("algebra"));
    if (kind == "CXE") {
      S = make_CXE(X, E);
    } else if (kind == "lip") {
      S = make_lip(X, E, e.at("alpha").get<double>());
    } else if (kind == "poly") {
      S = make_poly(X, E, e.at("degree").get<int>());
    } else if (kind == "rational") {
      std::vector<cplx> poles;
      for (const auto& p : e.at("poles")) poles.push_back(io::complex_from_json(p));
      S = make_rational(X, E, e.at("degree").get<int>(), poles);
    } else {
      std::vector<ValueTable> tables;
      for (const auto& t : e.at("basis")) tables.push_back(io::matrix_from_json(t));
      NormTag norm;
      if (e.contains("norm") && e.at("norm").is_object())
        norm = NormTag::lipschitz(e.at("norm").at("lipschitz").get<double>());
      S = make_system(X, E, tables, norm, e.value("closed", false));
    }
  }
  S.label = name;
  return systems_.emplace(name, S).first->second;
}

Quadruple Experiment::quadruple(const std::string& name) {
  const Json& e = section("quadruples", name);
  Quadruple Q{name, space(e.at("space")), algebra(e.at("algebra")), system(e.at("scalar_system")),
              system(e.at("vector_system"))};
  for (const FunctionSystem* S : {&Q.scalar, &Q.vector})
    if (S->space.labels != Q.space.labels) {
      ValidationReport rep;
      rep.subject = "config";
      rep.add("references", false, 1.0,
              "quadruple '" + name + "': system '" + S->label + "' lives on a different space");
      throw ConfigError(rep.checks.back().detail, rep);
    }
  return Q;
}

// ---------------------------------------------------------------- commands

Experiment::Artifacts Experiment::characters_command(const Json& cmd) {
  const Algebra E = algebra(cmd.at("algebra"));
  const auto chars = characters(E);
  const auto rad = radical(E, chars);
  Json report = io::characters_to_json(E, chars);
  Json radical_basis = Json::array();
  for (const auto& r : rad) radical_basis.push_back(io::to_json(r));
  report["dim"] = E.dim();
  report["radical"] = radical_basis;
  report["radical_dim"] = rad.size();
  report["quotient_dim"] = chars.size();
  report["semisimple"] = rad.empty();
  return {report, std::nullopt, std::nullopt};
}

Experiment::Artifacts Experiment::validate_command(const Json& cmd) {
  ValidationReport rep;
  if (cmd.contains("algebra")) {
    rep = validate_algebra(algebra(cmd.at("algebra")));
    rep.subject = "algebra " + cmd.at("algebra").get<std::string>();
  } else if (cmd.contains("system")) {
    const FunctionSystem S = system(cmd.at("system"));
    rep.subject = "system " + S.label;
    const ValueTable one = constant_table(S.space, S.scalars, S.scalars.unit);
    rep.add("contains_unit", span_membership(S, one).has_value());
    rep.add("separates_points", separation_check(S));
    const bool closed = products_in_span(S);
    rep.add("closed_under_products", closed, 0.0, S.closed ? "declared closed" : "not declared closed");
    if (S.space.has_distance()) {
      const ValidationReport m = validate_metric(S.space);
      std::string detail;
      for (const auto& c : m.checks)
        if (!c.passed) detail += (detail.empty() ? "" : "; ") + c.name + " " + c.detail;
      rep.add("metric", m.passed(), 0.0, detail);
    }
    rep.add("embedding_constant", true, embedding_constant(S, config_.seed), "observed lower bound");
  } else {
    const Quadruple Q = quadruple(cmd.at("quadruple"));
    rep = check_admissible(Q);
    rep.subject = "quadruple " + Q.label;
    rep.add("natural", check_natural(Q));
  }
  return {io::to_json(rep), std::nullopt, std::nullopt};
}

Experiment::Artifacts Experiment::hull_command(const Json& cmd) {
  const RasterRegion R = raster(cmd.at("raster"));
  const RasterRegion H = polynomial_hull_raster(R);
  Bitmap filled = H.grid;
  for (Index r = 0; r < H.rows(); ++r)
    for (Index c = 0; c < H.cols(); ++c) filled(r, c) = H.grid(r, c) && !R.grid(r, c);
  const auto boundary = topological_boundary_raster(H);
  Json report{{"raster", cmd.at("raster")},
              {"sidecar", io::raster_sidecar(H)},
              {"rows", H.rows()},
              {"cols", H.cols()},
              {"input_pixels", R.count()},
              {"hull_pixels", H.count()},
              {"filled_pixels", H.count() - R.count()},
              {"holes_filled", count_components(filled, 4)},
              {"boundary_points", boundary.size()}};
  return {report, io::points_csv(boundary), io::raster_pgm(H)};
}

Experiment::Artifacts Experiment::shilov_command(const Json& cmd) {
  const CertifyOptions options = options_from(cmd);
  WitnessFamily W;
  std::vector<cplx> points;
  if (cmd.contains("system")) {
    const FunctionSystem S = system(cmd.at("system"));
    W = witness_family(S);
    if (S.space.coords) {
      const Index per = S.points();
      for (Index i = 0; i < W.size(); ++i) points.push_back((*S.space.coords)[static_cast<std::size_t>(i % per)]);
    }
  } else {
    const Json& w = cmd.at("witness");
    W = io::witness_family_from_json(w);
    if (w.contains("points"))
      for (const auto& p : w.at("points")) points.push_back(io::complex_from_json(p));
  }
  const ShilovEstimate est = shilov_estimate(W, options);
  Json report = io::to_json(est, W);
  report["options"] = options_json(options);
  report["counts"] = {{"candidates", W.size()},
                      {"certified_peak", est.peaks.size()},
                      {"certified_not_peak", est.not_peaks.size()},
                      {"undecided", est.undecided.size()}};
  if (!est.peaks.empty()) {
    const BoundaryCheck b = is_boundary(W, est.peaks, config_.seed);
    report["boundary_check"] = {{"holds", b.holds},       {"worst_ratio", b.worst_ratio},
                                {"seed", b.seed},         {"samples", b.samples},
                                {"counterexample", b.holds ? Json(nullptr) : io::to_json(b.counterexample)}};
  }
  Artifacts out{report, std::nullopt, std::nullopt};
  if (!points.empty()) {
    out.csv = io::status_csv(points, statuses(est));
    if (cmd.contains("raster")) out.pgm = io::status_overlay_pgm(raster(cmd.at("raster")), points, statuses(est));
  }
  return out;
}

Experiment::Artifacts Experiment::product_command(const Json& cmd, bool peaks) {
  const Quadruple Q = quadruple(cmd.at("quadruple"));
  const CertifyOptions options = options_from(cmd);
  const Regime regime = cmd.value("regime", std::string("exact")) == "exact" ? Regime::exact : Regime::estimation;
  const ProductReport r = peaks ? verify_peak_product(Q, regime, options) : verify_product_theorem(Q, regime, options);
  Json report = io::to_json(r);
  report["options"] = options_json(options);
  std::string csv = "candidate,certified,expected\n";
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    const bool c = std::binary_search(r.certified.begin(), r.certified.end(), idx);
    const bool e = std::binary_search(r.expected.begin(), r.expected.end(), idx);
    csv += r.candidates[i] + "," + (c ? "1" : "0") + "," + (e ? "1" : "0") + "\n";
  }
  return {report, csv, std::nullopt};
}

Experiment::Artifacts Experiment::peaker_command(const Json& cmd) {
  const Quadruple Q = quadruple(cmd.at("quadruple"));
  const CertifyOptions options = options_from(cmd);
  const Json& target = cmd.at("target");

  const WitnessFamily WE = algebra_witnesses(Q.scalars);
  const Index psi = resolve_index(target.at("character"), WE.candidates, "character");
  const PeakCertificate cv = certify_peak(WE, psi, options);
  if (cv.status != PeakStatus::certified_peak)
    throw InvalidArgument("character " + WE.candidates[psi] + " is not certified as a peak point of E");
  VectorXc v = VectorXc::Zero(Q.scalars.dim());
  for (std::size_t j = 0; j < WE.columns.size(); ++j) v(WE.columns[j]) = cv.coefficients(static_cast<Index>(j));

  const WitnessFamily WB = witness_family(Q.scalar);
  const Index x = resolve_index(target.at("point"), Q.space.labels, "point");
  const PeakCertificate cf = certify_peak(WB, x, options);
  if (cf.status != PeakStatus::certified_peak)
    throw InvalidArgument("point " + Q.space.labels[x] + " is not certified as a peak point of B");
  VectorXc fc = VectorXc::Zero(Q.scalar.dim());
  for (std::size_t j = 0; j < WB.columns.size(); ++j) fc(WB.columns[j]) = cf.coefficients(static_cast<Index>(j));
  const ValueTable f = Q.scalar.combine(fc);

  const ProductPeaker g = synthesize_product_peaker(v, f, Q);
  const Index expected = psi * Q.space.size() + x;
  const bool matches = g.argmax == std::vector<Index>{expected};
  Json report{{"quadruple", Q.label},
              {"character", WE.candidates[psi]},
              {"point", Q.space.labels[x]},
              {"v", io::to_json(v)},
              {"v_certificate", io::to_json(cv, WE)},
              {"f", io::to_json(VectorXc(f.col(0)))},
              {"f_certificate", io::to_json(cf, WB)},
              {"peaker", io::to_json(g)},
              {"expected_argmax", Json::array({expected})},
              {"argmax_matches", matches},
              {"options", options_json(options)}};
  std::string csv = "psi,point,re,im,modulus\n";
  const auto chars = characters(Q.scalars);
  for (Index i = 0; i < g.gelfand_values.size(); ++i) {
    const cplx z = g.gelfand_values(i);
    std::ostringstream os;
    os.precision(17);
    os << chars[static_cast<std::size_t>(i / Q.space.size())].label << ',' << Q.space.labels[i % Q.space.size()] << ','
       << z.real() << ',' << z.imag() << ',' << std::abs(z) << '\n';
    csv += os.str();
  }
  return {report, csv, std::nullopt};
}

Experiment::Artifacts Experiment::execute(const Json& cmd) {
  const std::string c = cmd.at("command");
  if (c == "characters") return characters_command(cmd);
  if (c == "validate") return validate_command(cmd);
  if (c == "hull") return hull_command(cmd);
  if (c == "shilov") return shilov_command(cmd);
  if (c == "verify-product") return product_command(cmd, false);
  if (c == "verify-peaks") return product_command(cmd, true);
  if (c == "peaker") return peaker_command(cmd);
  throw InvalidArgument("unknown command '" + c + "'");
}

Json Experiment::evaluate(const Json& command) { return execute(command).report; }

CommandOutcome Experiment::run(const Json& command) {
  Artifacts a = execute(command);
  CommandOutcome out{command_name(command), command.at("command"), {}};
  const std::string base = (std::filesystem::path(config_.output_dir) / out.name).string();
  std::vector<std::string> files{out.name + ".report.json"};
  if (a.csv) files.push_back(out.name + ".csv");
  if (a.pgm) files.push_back(out.name + ".pgm");
  Json envelope{{"name", out.name},    {"command", out.command}, {"input", command},
                {"config_hash", config_.hash}, {"seed", config_.seed},  {"files", files},
                {"result", a.report}};
  io::write_file_atomic(base + ".report.json", io::dump(envelope));
  out.files.push_back(base + ".report.json");
  if (a.csv) {
    io::write_file_atomic(base + ".csv", *a.csv);
    out.files.push_back(base + ".csv");
  }
  if (a.pgm) {
    io::write_file_atomic(base + ".pgm", *a.pgm);
    out.files.push_back(base + ".pgm");
  }
  return out;
}

std::vector<CommandOutcome> Experiment::run_all() {
  std::vector<CommandOutcome> out;
  for (const auto& cmd : config_.doc.at("run")) out.push_back(run(cmd));
  return out;
}

}  // namespace shilov
