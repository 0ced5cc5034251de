// sosrelax command line: solve, solve-robust, check-sos, check-sosconvex,
// eval, dump-sdp. Reports go to stdout as one JSON object, summaries to
// stderr.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sosrelax/io/infix.hpp"
#include "sosrelax/io/problem_file.hpp"
#include "sosrelax/io/report.hpp"
#include "sosrelax/relax.hpp"
#include "sosrelax/robust.hpp"
#include "sosrelax/soscert.hpp"

using namespace sosrelax;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::optional<double> tol;
  std::optional<int> max_iter;
  bool assume_slater = false;
  std::string dump_sdp;
  bool no_recovery = false;
  std::optional<std::uint64_t> seed;
  bool no_timestamp = false;
  bool moments = false;
};

SolverOptions solver_options(const Flags& f, const io::FileOptions& file) {
  SolverOptions o;
  if (auto tol = f.tol ? f.tol : file.tol) {
    o.gap_tol = *tol;
    o.feas_tol = *tol;
  }
  if (auto it = f.max_iter ? f.max_iter : file.max_iter) o.max_iter = *it;
  return o;
}

std::uint64_t seed_of(const Flags& f, const io::FileOptions& file) {
  if (f.seed) return *f.seed;
  return file.seed.value_or(1);
}

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return kExitOk;
    case SolveStatus::kInfeasible:
    case SolveStatus::kUnbounded:
    case SolveStatus::kNoSlaterPoint: return kExitInfeasible;
    case SolveStatus::kNumericalFailure: return kExitNumerical;
  }
  return kExitNumerical;
}

void emit(const json& j) { std::cout << j.dump() << std::endl; }

void write_sdpa_file(const SdpProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io::ParseError("cannot write " + path);
  write_sdpa(p, out);
}

int run_solve(const std::string& path, const Flags& flags, bool robust) {
  const io::ProblemFile pf = io::load_problem(path);
  if (robust != pf.is_robust()) {
    throw io::ParseError(robust ? "solve-robust needs a file with a \"robust\" section"
                                : "robust files are solved with solve-robust");
  }
  RelaxOptions ro;
  ro.solver = solver_options(flags, pf.options);
  ro.assume_slater = flags.assume_slater;
  ro.recover = !flags.no_recovery;
  ro.slater_hint = pf.options.slater_hint;
  const SsaProgram prog = io::to_program(pf, ro.solver);
  if (!flags.dump_sdp.empty()) write_sdpa_file(build_primal(prog).problem, flags.dump_sdp);

  const SolveReport rep = solve_program(prog, ro);
  json j = io::solve_report_json(rep, {!flags.no_timestamp, flags.moments});
  if (robust && rep.x_star) {
    const RobustCheck check = verify_robust(*rep.x_star, *pf.robust, 32, seed_of(flags, pf.options), ro.solver);
    j["robust"] = io::robust_check_json(check);
  }
  emit(j);
  std::cerr << io::summary(rep);
  return exit_code(rep.status);
}

Polynomial read_polynomial(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return io::parse_polynomial_file(ss.str());
  }
  return io::parse_infix(arg);
}

int run_check(const std::string& arg, bool convex, bool gram, bool decompose, const Flags& flags) {
  const Polynomial f = read_polynomial(arg);
  SolverOptions o = default_sos_options();
  if (flags.max_iter) o.max_iter = *flags.max_iter;
  const SosResult res = convex ? is_sos_convex(f, o) : is_sos(f, o);
  json j = io::sos_result_json(res, gram, decompose);
  j["check"] = convex ? "sos-convex" : "sos";
  j["polynomial"] = f.to_string();
  emit(j);
  std::cerr << (convex ? "sos-convex: " : "sos: ") << to_string(res.verdict) << "  margin " << res.margin << "\n";
  return res.verdict == Verdict::kUnknown ? kExitNumerical : kExitOk;
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> x;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::ParseError("malformed point coordinate '" + item + "'");
    }
  }
  return x;
}

int run_eval(const std::string& path, const std::string& point, const Flags& flags) {
  const io::ProblemFile pf = io::load_problem(path);
  const SolverOptions o = solver_options(flags, pf.options);
  const SsaProgram prog = io::to_program(pf, o);
  const auto x = parse_point(point);
  if (static_cast<int>(x.size()) != prog.n()) {
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, the file has n = " + std::to_string(prog.n()));
  }
  json cs = json::array();
  for (const auto& c : prog.constraints) cs.push_back(eval(c, x, o));
  emit({{"x", x}, {"objective", eval(prog.objective, x, o)}, {"constraints", cs}});
  return kExitOk;
}

int run_dump(const std::string& path, std::string primal, std::string dual, const Flags& flags) {
  const io::ProblemFile pf = io::load_problem(path);
  const SsaProgram prog = io::to_program(pf, solver_options(flags, pf.options));
  const std::string stem = std::filesystem::path(path).stem().string();
  if (primal.empty()) primal = stem + ".primal.dat-s";
  if (dual.empty()) dual = stem + ".dual.dat-s";
  write_sdpa_file(build_primal(prog).problem, primal);
  write_sdpa_file(build_dual(prog).problem, dual);
  emit({{"primal", primal}, {"dual", dual}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact SDP relaxations of SOS-convex semialgebraic programs"};
  app.require_subcommand(1);
  Flags flags;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", flags.tol, "solver gap and feasibility tolerance");
    sub->add_option("--max-iter", flags.max_iter, "interior-point iteration limit");
  };
  auto add_solve_flags = [&](CLI::App* sub) {
    add_solver_flags(sub);
    sub->add_flag("--assume-slater", flags.assume_slater, "solve even when no strictly feasible point is found");
    sub->add_option("--dump-sdp", flags.dump_sdp, "also write the primal relaxation in SDPA format");
    sub->add_flag("--no-recovery", flags.no_recovery, "skip recovery of x*");
    sub->add_option("--seed", flags.seed, "seed for verification sampling");
    sub->add_flag("--no-timestamp", flags.no_timestamp, "omit timing fields from the report");
    sub->add_flag("--moments", flags.moments, "include the moment vector in the report");
  };

  std::string file, poly, point, primal_out, dual_out;
  bool gram = false, decompose = false;

  auto* solve_cmd = app.add_subcommand("solve", "solve a program file");
  solve_cmd->add_option("file", file, "problem file")->required();
  add_solve_flags(solve_cmd);

  auto* robust_cmd = app.add_subcommand("solve-robust", "reduce, solve and verify a robust program file");
  robust_cmd->add_option("file", file, "problem file")->required();
  add_solve_flags(robust_cmd);

  auto* sos_cmd = app.add_subcommand("check-sos", "decide whether a polynomial is a sum of squares");
  auto* sosc_cmd = app.add_subcommand("check-sosconvex", "decide whether a polynomial is SOS-convex");
  for (auto* sub : {sos_cmd, sosc_cmd}) {
    sub->add_option("polynomial", poly, "inline polynomial or polynomial file")->required();
    sub->add_flag("--gram", gram, "print the Gram matrix");
    sub->add_flag("--decompose", decompose, "print a sum-of-squares decomposition");
    sub->add_option("--max-iter", flags.max_iter, "interior-point iteration limit");
  }

  auto* eval_cmd = app.add_subcommand("eval", "evaluate every function of a file at a point");
  eval_cmd->add_option("file", file, "problem file")->required();
  eval_cmd->add_option("--x", point, "comma-separated point")->required();
  add_solver_flags(eval_cmd);

  auto* dump_cmd = app.add_subcommand("dump-sdp", "write both relaxations in SDPA format");
  dump_cmd->add_option("file", file, "problem file")->required();
  dump_cmd->add_option("--primal", primal_out, "output path of the primal relaxation");
  dump_cmd->add_option("--dual", dual_out, "output path of the moment relaxation");
  add_solver_flags(dump_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve_cmd) return run_solve(file, flags, false);
    if (*robust_cmd) return run_solve(file, flags, true);
    if (*sos_cmd) return run_check(poly, false, gram, decompose, flags);
    if (*sosc_cmd) return run_check(poly, true, gram, decompose, flags);
    if (*eval_cmd) return run_eval(file, point, flags);
    if (*dump_cmd) return run_dump(file, primal_out, dual_out, flags);
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
