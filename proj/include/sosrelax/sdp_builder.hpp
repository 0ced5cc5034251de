#pragma once

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "sosrelax/sdp.hpp"
#include "sosrelax/sym_matrix.hpp"

namespace sosrelax {

// Block structure of a matrix pencil A_0 + sum_k v_k A_k. Indices that are
// coupled by a nonzero off-diagonal entry of any A_k end up in the same
// component. One-by-one components are scalar inequalities; two scalar
// components whose data are exact negatives of each other pin an affine
// expression to a constant and are treated as one equality.
class LmiStructure {
 public:
  enum class Kind { kBlock, kScalar, kPinned, kPinnedPartner, kEmpty };

  struct Component {
    Kind kind = Kind::kBlock;
    std::vector<int> indices;  // rows of the pencil, ascending
    int partner = -1;          // for kPinned / kPinnedPartner
  };

  LmiStructure() = default;
  // `matrices` lists every matrix of the pencil, constant term included.
  explicit LmiStructure(const std::vector<SymMatrix>& matrices, bool detect_pinned = true);

  int dim() const { return dim_; }
  const std::vector<Component>& components() const { return components_; }
  bool has_pinned() const;

 private:
  int dim_ = 0;
  std::vector<Component> components_;
};

// Scalar expression over builder variables. Coefficients multiply the value
// of the variable itself (for an off-diagonal PSD entry: the entry X_ij, not
// the trace pairing).
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(int var, double coef) { terms.emplace_back(var, coef); }
  LinExpr& add(int var, double coef) {
    if (coef != 0.0) terms.emplace_back(var, coef);
    return *this;
  }
  LinExpr& add(const LinExpr& e, double scale = 1.0);
};

// Assembles an SdpProblem from named scalar variables, PSD matrix variables
// and linear matrix inequalities, and maps a solution back.
class SdpBuilder {
 public:
  int add_free();
  int add_nonneg();
  // New PSD matrix variable; returns its handle.
  int add_psd(int dim);
  // Variable id of entry (i, j) of PSD variable `handle`.
  int entry(int handle, int i, int j) const;
  int psd_dim(int handle) const { return psd_dims_[static_cast<std::size_t>(handle)]; }

  // Returns the row number among equalities / inequalities.
  int add_equality(const LinExpr& e, double rhs);
  int add_inequality(const LinExpr& e, double rhs, RowSense sense);
  void set_objective(ObjectiveSense sense, const LinExpr& e);

  // A matrix-valued affine expression sum_k v_k M_k + C.
  struct MatrixTerm {
    int var;
    SymMatrix m;
  };

  // Imposes constant + sum terms >= 0. With `margin` = t the non-pinned
  // parts must satisfy pencil - t I >= 0 instead. Returns an LMI handle.
  int add_lmi(const LmiStructure& s, const SymMatrix& constant, const std::vector<MatrixTerm>& terms,
              std::optional<int> margin = std::nullopt);

  // PSD matrix variable with the block pattern of `s`: zero across
  // components, a PSD block on each block component, a nonnegative scalar on
  // each scalar component and a free scalar w for each pinned pair (entries
  // max(w,0) and max(-w,0) when reported). Returns a structured handle.
  int add_structured_psd(const LmiStructure& s);
  // Tr(Z M) for a structured variable Z as an expression.
  LinExpr trace_with(int structured, const SymMatrix& m) const;
  SymMatrix structured_value(const SdpSolution& sol, int structured) const;

  SdpProblem build() const;

  double value(const SdpSolution& sol, int var) const;
  double ray_value(const SdpSolution& sol, int var) const;
  // Dual matrix of an LMI (PSD for any dual-feasible solution).
  SymMatrix lmi_dual(const SdpSolution& sol, int lmi) const;

  int var_count() const { return static_cast<int>(vars_.size()); }

 private:
  enum class VarKind { kFree, kNonneg, kPsdEntry };
  struct VarInfo {
    VarKind kind;
    int block = -1;  // PSD handle or ordinal within its kind
    int i = 0, j = 0;
  };
  struct LmiRecord {
    int dim;
    // per component: PSD handle for blocks, inequality row for scalars,
    // equality row for pinned pairs
    std::vector<LmiStructure::Component> comps;
    std::vector<int> where;
  };
  struct StructuredRecord {
    int dim;
    std::vector<LmiStructure::Component> comps;
    std::vector<int> where;  // PSD handle, nonneg var or free var
  };

  int scalar_index(const ConeSpec& cone, int var) const;
  LinearFunctional functional(const ConeSpec& cone, const LinExpr& e) const;
  ConeSpec cone() const;

  std::vector<VarInfo> vars_;
  std::vector<int> psd_dims_;
  std::vector<std::vector<int>> psd_entry_ids_;
  int n_free_ = 0;
  int n_nonneg_ = 0;
  std::vector<std::pair<LinExpr, double>> eqs_;
  std::vector<std::tuple<LinExpr, double, RowSense>> ineqs_;
  ObjectiveSense sense_ = ObjectiveSense::kMinimize;
  LinExpr objective_;
  std::vector<LmiRecord> lmis_;
  std::vector<StructuredRecord> structured_;
};

}  // namespace sosrelax
