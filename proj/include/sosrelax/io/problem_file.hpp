#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "sosrelax/errors.hpp"
#include "sosrelax/poly.hpp"
#include "sosrelax/robust.hpp"
#include "sosrelax/sdp.hpp"
#include "sosrelax/spectra.hpp"
#include "sosrelax/ssafunc.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax::io {

// Syntax or schema error in an input file. line/column are 1-based and 0 when
// unknown; `where` is a JSON pointer for schema errors.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0, int column = 0, std::string where = {});
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& where() const { return where_; }

 private:
  int line_;
  int column_;
  std::string where_;
};

struct OmegaSpec {
  enum class Kind { kLmi, kSimplex, kL2Ball, kBox, kPsdTraceOne, kPoint };
  Kind kind = Kind::kLmi;
  int size = 0;                    // simplex, l2_ball, psd_trace_one
  std::vector<double> lo, hi;      // box; point uses lo
  std::vector<SymMatrix> a, b;     // lmi

  friend bool operator==(const OmegaSpec&, const OmegaSpec&) = default;
};

struct FunctionSpec {
  enum class Kind { kPieces, kBuilder, kSum, kScale };
  Kind kind = Kind::kPieces;
  // pieces
  std::vector<Polynomial> h;
  std::optional<OmegaSpec> omega;  // absent: plain polynomial
  int degree = -1;
  // builder: "l1_norm", "euclidean_norm" or "lambda_max" (with k)
  std::string builder;
  int k = 0;
  // sum / scale
  std::vector<FunctionSpec> parts;
  double factor = 1.0;

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;
};

struct FileOptions {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> slater_hint;

  friend bool operator==(const FileOptions&, const FileOptions&) = default;
};

struct ProblemFile {
  std::string version = "1";
  int n = 0;
  // plain programs
  std::optional<FunctionSpec> objective;
  std::vector<FunctionSpec> constraints;
  // robust programs
  std::optional<RobustProgram> robust;
  FileOptions options;

  bool is_robust() const { return robust.has_value(); }
  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

ProblemFile parse_problem(std::istream& in);
ProblemFile parse_problem_string(const std::string& text);
ProblemFile load_problem(const std::string& path);
std::string serialize_problem(const ProblemFile& pf);

// Polynomial file: {"version": "1", "n": k, "polynomial": [terms]}.
Polynomial parse_polynomial_file(const std::string& text);

SsaFunction to_function(const FunctionSpec& spec, int n, const SolverOptions& opts = {});
// The SSA program of a plain or robust file.
SsaProgram to_program(const ProblemFile& pf, const SolverOptions& opts = {});

}  // namespace sosrelax::io
