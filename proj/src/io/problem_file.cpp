#include "sosrelax/io/problem_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sosrelax::io {

using nlohmann::json;

ParseError::ParseError(const std::string& msg, int line, int column, std::string where)
    : Error(msg), line_(line), column_(column), where_(std::move(where)) {}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError((where.empty() ? std::string("top level") : where) + ": " + msg, 0, 0, where);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) fail(where, "unknown field \"" + k + "\"");
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::vector<double> get_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], where + "/" + std::to_string(i)));
  return v;
}

Polynomial get_poly(const json& j, int n, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of terms");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "/" + std::to_string(i);
    allow_keys(j[i], w, {"exps", "coef"});
    const json& e = need(j[i], w, "exps");
    if (!e.is_array() || static_cast<int>(e.size()) != n) fail(w + "/exps", "expected " + std::to_string(n) + " exponents");
    Term t;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const int x = get_int(e[k], w + "/exps/" + std::to_string(k));
      if (x < 0) fail(w + "/exps/" + std::to_string(k), "negative exponent");
      t.exps.push_back(x);
    }
    t.coef = get_number(need(j[i], w, "coef"), w + "/coef");
    terms.push_back(std::move(t));
  }
  try {
    return Polynomial::from_terms(n, terms);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json put_poly(const Polynomial& p) {
  json out = json::array();
  for (const auto& t : p.terms(0.0)) out.push_back({{"exps", t.exps}, {"coef", t.coef}});
  return out;
}

SymMatrix get_matrix(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a lower triangle given row by row");
  const int dim = static_cast<int>(j.size());
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) {
    const std::string w = where + "/" + std::to_string(i);
    const auto row = get_vector(j[static_cast<std::size_t>(i)], w);
    if (static_cast<int>(row.size()) != i + 1) fail(w, "row " + std::to_string(i) + " must have " + std::to_string(i + 1) + " entries");
    for (int c = 0; c <= i; ++c) m.at(i, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

json put_matrix(const SymMatrix& m) {
  json out = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int c = 0; c <= i; ++c) row.push_back(m(i, c));
    out.push_back(row);
  }
  return out;
}

std::vector<SymMatrix> get_matrices(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of matrices");
  std::vector<SymMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_matrix(j[i], where + "/" + std::to_string(i)));
  return out;
}

json put_matrices(const std::vector<SymMatrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(put_matrix(m));
  return out;
}

OmegaSpec get_omega(const json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) fail(where, "expected exactly one of lmi, simplex, l2_ball, box, psd_trace_one, point");
  OmegaSpec o;
  const auto& [key, v] = *j.items().begin();
  const std::string w = where + "/" + key;
  if (key == "lmi") {
    allow_keys(v, w, {"a", "b"});
    o.kind = OmegaSpec::Kind::kLmi;
    o.a = get_matrices(need(v, w, "a"), w + "/a");
    if (v.contains("b")) o.b = get_matrices(v.at("b"), w + "/b");
    if (o.a.empty()) fail(w + "/a", "needs at least A_0");
  } else if (key == "simplex" || key == "l2_ball" || key == "psd_trace_one") {
    o.kind = key == "simplex" ? OmegaSpec::Kind::kSimplex
             : key == "l2_ball" ? OmegaSpec::Kind::kL2Ball
                                : OmegaSpec::Kind::kPsdTraceOne;
    o.size = get_int(v, w);
    if (o.size < 1) fail(w, "size must be positive");
  } else if (key == "box") {
    allow_keys(v, w, {"lo", "hi"});
    o.kind = OmegaSpec::Kind::kBox;
    o.lo = get_vector(need(v, w, "lo"), w + "/lo");
    o.hi = get_vector(need(v, w, "hi"), w + "/hi");
    if (o.lo.size() != o.hi.size()) fail(w, "lo and hi differ in length");
  } else if (key == "point") {
    o.kind = OmegaSpec::Kind::kPoint;
    o.lo = get_vector(v, w);
  } else {
    fail(where, "unknown index set \"" + key + "\"");
  }
  return o;
}

json put_omega(const OmegaSpec& o) {
  switch (o.kind) {
    case OmegaSpec::Kind::kLmi: {
      json v = {{"a", put_matrices(o.a)}};
      if (!o.b.empty()) v["b"] = put_matrices(o.b);
      return {{"lmi", v}};
    }
    case OmegaSpec::Kind::kSimplex: return {{"simplex", o.size}};
    case OmegaSpec::Kind::kL2Ball: return {{"l2_ball", o.size}};
    case OmegaSpec::Kind::kPsdTraceOne: return {{"psd_trace_one", o.size}};
    case OmegaSpec::Kind::kBox: return {{"box", {{"lo", o.lo}, {"hi", o.hi}}}};
    case OmegaSpec::Kind::kPoint: return {{"point", o.lo}};
  }
  return {};
}

FunctionSpec get_function(const json& j, int n, const std::string& where) {
  FunctionSpec f;
  if (!j.is_object()) fail(where, "expected a function object");
  if (j.contains("builder")) {
    allow_keys(j, where, {"builder", "k"});
    f.kind = FunctionSpec::Kind::kBuilder;
    const json& b = j.at("builder");
    if (!b.is_string()) fail(where + "/builder", "expected a string");
    f.builder = b.get<std::string>();
    if (f.builder == "lambda_max") {
      f.k = get_int(need(j, where, "k"), where + "/k");
      if (f.k < 1 || packed_size(f.k) != n) fail(where + "/k", "lambda_max of k x k matrices needs n = k(k+1)/2");
    } else if (f.builder == "l1_norm" || f.builder == "euclidean_norm") {
      if (j.contains("k")) fail(where, "unknown field \"k\"");
    } else {
      fail(where + "/builder", "unknown builder \"" + f.builder + "\"");
    }
  } else if (j.contains("sum")) {
    allow_keys(j, where, {"sum"});
    f.kind = FunctionSpec::Kind::kSum;
    const json& s = j.at("sum");
    if (!s.is_array() || s.empty()) fail(where + "/sum", "expected a nonempty list of functions");
    for (std::size_t i = 0; i < s.size(); ++i) f.parts.push_back(get_function(s[i], n, where + "/sum/" + std::to_string(i)));
  } else if (j.contains("scale")) {
    allow_keys(j, where, {"scale", "of"});
    f.kind = FunctionSpec::Kind::kScale;
    f.factor = get_number(j.at("scale"), where + "/scale");
    if (f.factor < 0.0) fail(where + "/scale", "scale factor must be nonnegative");
    f.parts.push_back(get_function(need(j, where, "of"), n, where + "/of"));
  } else {
    allow_keys(j, where, {"h", "omega", "degree"});
    f.kind = FunctionSpec::Kind::kPieces;
    const json& h = need(j, where, "h");
    if (!h.is_array() || h.empty()) fail(where + "/h", "expected a nonempty list of polynomials");
    for (std::size_t i = 0; i < h.size(); ++i) f.h.push_back(get_poly(h[i], n, where + "/h/" + std::to_string(i)));
    if (j.contains("omega")) f.omega = get_omega(j.at("omega"), where + "/omega");
    if (j.contains("degree")) f.degree = get_int(j.at("degree"), where + "/degree");
  }
  return f;
}

json put_function(const FunctionSpec& f) {
  switch (f.kind) {
    case FunctionSpec::Kind::kBuilder: {
      json out = {{"builder", f.builder}};
      if (f.builder == "lambda_max") out["k"] = f.k;
      return out;
    }
    case FunctionSpec::Kind::kSum: {
      json parts = json::array();
      for (const auto& p : f.parts) parts.push_back(put_function(p));
      return {{"sum", parts}};
    }
    case FunctionSpec::Kind::kScale: return {{"scale", f.factor}, {"of", put_function(f.parts.front())}};
    case FunctionSpec::Kind::kPieces: {
      json h = json::array();
      for (const auto& p : f.h) h.push_back(put_poly(p));
      json out = {{"h", h}};
      if (f.omega) out["omega"] = put_omega(*f.omega);
      if (f.degree >= 0) out["degree"] = f.degree;
      return out;
    }
  }
  return {};
}

RobustProgram get_robust(const json& j, int n, const std::string& where) {
  allow_keys(j, where, {"objective", "constraints"});
  RobustProgram rp;
  rp.objective = get_poly(need(j, where, "objective"), n, where + "/objective");
  const json& cs = need(j, where, "constraints");
  if (!cs.is_array()) fail(where + "/constraints", "expected a list");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string w = where + "/constraints/" + std::to_string(i);
    allow_keys(cs[i], w, {"g", "t", "U"});
    UncertainConstraint c;
    const json& g = need(cs[i], w, "g");
    if (!g.is_array() || g.empty()) fail(w + "/g", "expected a nonempty list of polynomials");
    for (std::size_t k = 0; k < g.size(); ++k) c.g.push_back(get_poly(g[k], n, w + "/g/" + std::to_string(k)));
    c.t = get_int(need(cs[i], w, "t"), w + "/t");
    c.a = get_matrices(need(cs[i], w, "U"), w + "/U");
    if (c.a.size() != c.g.size()) fail(w + "/U", "expected one matrix per polynomial (A^0..A^s)");
    rp.constraints.push_back(std::move(c));
  }
  return rp;
}

json put_robust(const RobustProgram& rp) {
  json cs = json::array();
  for (const auto& c : rp.constraints) {
    json g = json::array();
    for (const auto& p : c.g) g.push_back(put_poly(p));
    cs.push_back({{"g", g}, {"t", c.t}, {"U", put_matrices(c.a)}});
  }
  return {{"objective", put_poly(rp.objective)}, {"constraints", cs}};
}

FileOptions get_options(const json& j, int n, const std::string& where) {
  allow_keys(j, where, {"tol", "max_iter", "seed", "slater_hint"});
  FileOptions o;
  if (j.contains("tol")) {
    o.tol = get_number(j.at("tol"), where + "/tol");
    if (!(*o.tol > 0.0)) fail(where + "/tol", "tolerance must be positive");
  }
  if (j.contains("max_iter")) {
    o.max_iter = get_int(j.at("max_iter"), where + "/max_iter");
    if (*o.max_iter < 1) fail(where + "/max_iter", "must be positive");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail(where + "/seed", "expected a nonnegative integer");
    o.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("slater_hint")) {
    o.slater_hint = get_vector(j.at("slater_hint"), where + "/slater_hint");
    if (static_cast<int>(o.slater_hint->size()) != n) fail(where + "/slater_hint", "expected n entries");
  }
  return o;
}

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col), line, col);
  }
}

void check_version(const json& j) {
  const json& v = need(j, "", "version");
  if (!v.is_string() || v.get<std::string>() != "1") fail("/version", "unsupported version (expected \"1\")");
}

}  // namespace

ProblemFile parse_problem_string(const std::string& text) {
  const json j = parse_json(text);
  allow_keys(j, "", {"version", "n", "objective", "constraints", "robust", "options"});
  check_version(j);
  ProblemFile pf;
  pf.n = get_int(need(j, "", "n"), "/n");
  if (pf.n < 1 || pf.n > kMaxVariables) fail("/n", "variable count must lie in [1, 8]");
  if (j.contains("robust")) {
    if (j.contains("objective") || j.contains("constraints")) fail("", "robust files carry objective and constraints inside \"robust\"");
    pf.robust = get_robust(j.at("robust"), pf.n, "/robust");
  } else {
    pf.objective = get_function(need(j, "", "objective"), pf.n, "/objective");
    if (j.contains("constraints")) {
      const json& cs = j.at("constraints");
      if (!cs.is_array()) fail("/constraints", "expected a list");
      for (std::size_t i = 0; i < cs.size(); ++i) pf.constraints.push_back(get_function(cs[i], pf.n, "/constraints/" + std::to_string(i)));
    }
  }
  if (j.contains("options")) pf.options = get_options(j.at("options"), pf.n, "/options");
  return pf;
}

ProblemFile parse_problem(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_string(ss.str());
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_problem(in);
}

std::string serialize_problem(const ProblemFile& pf) {
  json j = {{"version", pf.version}, {"n", pf.n}};
  if (pf.robust) {
    j["robust"] = put_robust(*pf.robust);
  } else {
    if (pf.objective) j["objective"] = put_function(*pf.objective);
    json cs = json::array();
    for (const auto& c : pf.constraints) cs.push_back(put_function(c));
    j["constraints"] = cs;
  }
  json o = json::object();
  if (pf.options.tol) o["tol"] = *pf.options.tol;
  if (pf.options.max_iter) o["max_iter"] = *pf.options.max_iter;
  if (pf.options.seed) o["seed"] = *pf.options.seed;
  if (pf.options.slater_hint) o["slater_hint"] = *pf.options.slater_hint;
  if (!o.empty()) j["options"] = o;
  return j.dump(2) + "\n";
}

Polynomial parse_polynomial_file(const std::string& text) {
  const json j = parse_json(text);
  allow_keys(j, "", {"version", "n", "polynomial"});
  check_version(j);
  const int n = get_int(need(j, "", "n"), "/n");
  if (n < 1 || n > kMaxVariables) fail("/n", "variable count must lie in [1, 8]");
  return get_poly(need(j, "", "polynomial"), n, "/polynomial");
}

namespace {

Spectrahedron to_omega(const OmegaSpec& o, const SolverOptions& opts) {
  switch (o.kind) {
    case OmegaSpec::Kind::kLmi: return Spectrahedron::from_lmi(o.a, o.b, opts);
    case OmegaSpec::Kind::kSimplex: return Spectrahedron::simplex(o.size);
    case OmegaSpec::Kind::kL2Ball: return Spectrahedron::l2_ball(o.size);
    case OmegaSpec::Kind::kBox: return Spectrahedron::box(o.lo, o.hi);
    case OmegaSpec::Kind::kPsdTraceOne: return Spectrahedron::psd_trace_one(o.size);
    case OmegaSpec::Kind::kPoint: return Spectrahedron::point(o.lo);
  }
  throw InvalidInput("unknown index set");
}

}  // namespace

SsaFunction to_function(const FunctionSpec& spec, int n, const SolverOptions& opts) {
  switch (spec.kind) {
    case FunctionSpec::Kind::kBuilder:
      if (spec.builder == "l1_norm") return l1_norm(n);
      if (spec.builder == "euclidean_norm") return euclidean_norm(n);
      return lambda_max(spec.k);
    case FunctionSpec::Kind::kSum: {
      SsaFunction acc = to_function(spec.parts.front(), n, opts);
      for (std::size_t i = 1; i < spec.parts.size(); ++i) acc = add(acc, to_function(spec.parts[i], n, opts));
      return acc;
    }
    case FunctionSpec::Kind::kScale: return scale(spec.factor, to_function(spec.parts.front(), n, opts));
    case FunctionSpec::Kind::kPieces: {
      if (!spec.omega) {
        if (spec.h.size() != 1) throw InvalidInput("a function without an index set takes exactly one polynomial");
        SsaFunction f(n, spec.h, Spectrahedron::point({}), spec.degree);
        return f;
      }
      return SsaFunction(n, spec.h, to_omega(*spec.omega, opts), spec.degree);
    }
  }
  throw InvalidInput("unknown function form");
}

SsaProgram to_program(const ProblemFile& pf, const SolverOptions& opts) {
  if (pf.robust) return to_ssa_program(*pf.robust, opts);
  SsaProgram prog{to_function(*pf.objective, pf.n, opts), {}};
  for (const auto& c : pf.constraints) prog.constraints.push_back(to_function(c, pf.n, opts));
  return prog;
}

}  // namespace sosrelax::io
