#include "sosrelax/sdp_builder.hpp"

#include <algorithm>
#include <numeric>

#include "sosrelax/errors.hpp"

namespace sosrelax {

LmiStructure::LmiStructure(const std::vector<SymMatrix>& matrices, bool detect_pinned) {
  if (matrices.empty()) return;
  dim_ = matrices.front().dim();
  for (const auto& m : matrices) {
    if (m.dim() != dim_) throw DimensionError("pencil matrices differ in size");
  }
  std::vector<int> parent(static_cast<std::size_t>(dim_));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (const auto& m : matrices) {
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < i; ++j) {
        if (m(i, j) != 0.0) parent[static_cast<std::size_t>(find(i))] = find(j);
      }
    }
  }
  std::vector<int> comp_of_root(static_cast<std::size_t>(dim_), -1);
  for (int i = 0; i < dim_; ++i) {
    const int r = find(i);
    int& c = comp_of_root[static_cast<std::size_t>(r)];
    if (c < 0) {
      c = static_cast<int>(components_.size());
      components_.emplace_back();
    }
    components_[static_cast<std::size_t>(c)].indices.push_back(i);
  }

  auto diag_data = [&](int i) {
    std::vector<double> v;
    for (const auto& m : matrices) v.push_back(m(i, i));
    return v;
  };
  for (auto& c : components_) {
    if (c.indices.size() > 1) continue;
    const auto v = diag_data(c.indices[0]);
    const bool zero = std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0; });
    c.kind = zero ? Kind::kEmpty : Kind::kScalar;
  }
  for (std::size_t a = 0; a < components_.size() && detect_pinned; ++a) {
    if (components_[a].kind != Kind::kScalar) continue;
    const auto va = diag_data(components_[a].indices[0]);
    for (std::size_t b = a + 1; b < components_.size(); ++b) {
      if (components_[b].kind != Kind::kScalar) continue;
      const auto vb = diag_data(components_[b].indices[0]);
      bool opposite = true;
      for (std::size_t k = 0; k < va.size() && opposite; ++k) opposite = va[k] == -vb[k];
      if (!opposite) continue;
      components_[a].kind = Kind::kPinned;
      components_[a].partner = static_cast<int>(b);
      components_[b].kind = Kind::kPinnedPartner;
      components_[b].partner = static_cast<int>(a);
      break;
    }
  }
}

bool LmiStructure::has_pinned() const {
  return std::any_of(components_.begin(), components_.end(),
                     [](const Component& c) { return c.kind == Kind::kPinned; });
}

LinExpr& LinExpr::add(const LinExpr& e, double scale) {
  for (const auto& [v, c] : e.terms) add(v, scale * c);
  constant += scale * e.constant;
  return *this;
}

int SdpBuilder::add_free() {
  vars_.push_back({VarKind::kFree, n_free_++});
  return static_cast<int>(vars_.size()) - 1;
}

int SdpBuilder::add_nonneg() {
  vars_.push_back({VarKind::kNonneg, n_nonneg_++});
  return static_cast<int>(vars_.size()) - 1;
}

int SdpBuilder::add_psd(int dim) {
  if (dim < 1) throw InvalidInput("PSD variable dimension must be positive");
  const int handle = static_cast<int>(psd_dims_.size());
  psd_dims_.push_back(dim);
  std::vector<int> ids(static_cast<std::size_t>(packed_size(dim)));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      vars_.push_back({VarKind::kPsdEntry, handle, i, j});
      ids[static_cast<std::size_t>(packed_index(i, j))] = static_cast<int>(vars_.size()) - 1;
    }
  }
  psd_entry_ids_.push_back(std::move(ids));
  return handle;
}

int SdpBuilder::entry(int handle, int i, int j) const {
  return psd_entry_ids_[static_cast<std::size_t>(handle)][static_cast<std::size_t>(packed_index(i, j))];
}

int SdpBuilder::add_equality(const LinExpr& e, double rhs) {
  eqs_.emplace_back(e, rhs);
  return static_cast<int>(eqs_.size()) - 1;
}

int SdpBuilder::add_inequality(const LinExpr& e, double rhs, RowSense sense) {
  ineqs_.emplace_back(e, rhs, sense);
  return static_cast<int>(ineqs_.size()) - 1;
}

void SdpBuilder::set_objective(ObjectiveSense sense, const LinExpr& e) {
  sense_ = sense;
  objective_ = e;
}

int SdpBuilder::add_lmi(const LmiStructure& s, const SymMatrix& constant, const std::vector<MatrixTerm>& terms,
                        std::optional<int> margin) {
  if (constant.dim() != s.dim()) throw DimensionError("LMI constant does not match its structure");
  for (const auto& t : terms) {
    if (t.m.dim() != s.dim()) throw DimensionError("LMI coefficient does not match its structure");
  }
  LmiRecord rec;
  rec.dim = s.dim();
  rec.comps = s.components();
  // pencil entry (i, j) as an expression
  auto pencil = [&](int i, int j) {
    LinExpr e;
    for (const auto& t : terms) e.add(t.var, t.m(i, j));
    e.constant = constant(i, j);
    return e;
  };
  for (const auto& c : rec.comps) {
    using Kind = LmiStructure::Kind;
    switch (c.kind) {
      case Kind::kBlock: {
        const int k = static_cast<int>(c.indices.size());
        const int h = add_psd(k);
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b <= a; ++b) {
            LinExpr e = pencil(c.indices[static_cast<std::size_t>(a)], c.indices[static_cast<std::size_t>(b)]);
            if (margin && a == b) e.add(*margin, -1.0);
            // S_ab = pencil_ab
            LinExpr row(entry(h, a, b), 1.0);
            row.add(e, -1.0);
            add_equality(row, 0.0);
          }
        }
        rec.where.push_back(h);
        break;
      }
      case Kind::kScalar: {
        LinExpr e = pencil(c.indices[0], c.indices[0]);
        if (margin) e.add(*margin, -1.0);
        rec.where.push_back(add_inequality(e, 0.0, RowSense::kGreaterEqual));
        break;
      }
      case Kind::kPinned:
        rec.where.push_back(add_equality(pencil(c.indices[0], c.indices[0]), 0.0));
        break;
      case Kind::kPinnedPartner:
      case Kind::kEmpty:
        rec.where.push_back(-1);
        break;
    }
  }
  lmis_.push_back(std::move(rec));
  return static_cast<int>(lmis_.size()) - 1;
}

int SdpBuilder::add_structured_psd(const LmiStructure& s) {
  StructuredRecord rec;
  rec.dim = s.dim();
  rec.comps = s.components();
  for (const auto& c : rec.comps) {
    using Kind = LmiStructure::Kind;
    switch (c.kind) {
      case Kind::kBlock: rec.where.push_back(add_psd(static_cast<int>(c.indices.size()))); break;
      case Kind::kScalar: rec.where.push_back(add_nonneg()); break;
      case Kind::kPinned: rec.where.push_back(add_free()); break;
      case Kind::kPinnedPartner:
      case Kind::kEmpty: rec.where.push_back(-1); break;
    }
  }
  structured_.push_back(std::move(rec));
  return static_cast<int>(structured_.size()) - 1;
}

LinExpr SdpBuilder::trace_with(int structured, const SymMatrix& m) const {
  const auto& rec = structured_[static_cast<std::size_t>(structured)];
  if (m.dim() != rec.dim) throw DimensionError("trace pairing with a matrix of the wrong size");
  LinExpr e;
  for (std::size_t ci = 0; ci < rec.comps.size(); ++ci) {
    const auto& c = rec.comps[ci];
    const int w = rec.where[ci];
    using Kind = LmiStructure::Kind;
    switch (c.kind) {
      case Kind::kBlock: {
        const int k = static_cast<int>(c.indices.size());
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b <= a; ++b) {
            const double v = m(c.indices[static_cast<std::size_t>(a)], c.indices[static_cast<std::size_t>(b)]);
            e.add(entry(w, a, b), a == b ? v : 2.0 * v);
          }
        }
        break;
      }
      case Kind::kScalar: e.add(w, m(c.indices[0], c.indices[0])); break;
      case Kind::kPinned: {
        const int other = rec.comps[static_cast<std::size_t>(c.partner)].indices[0];
        const double v = m(c.indices[0], c.indices[0]);
        if (m(other, other) != -v) throw InvalidInput("matrix does not respect the pinned structure");
        e.add(w, v);
        break;
      }
      case Kind::kPinnedPartner: break;
      case Kind::kEmpty: break;
    }
  }
  return e;
}

SymMatrix SdpBuilder::structured_value(const SdpSolution& sol, int structured) const {
  const auto& rec = structured_[static_cast<std::size_t>(structured)];
  SymMatrix z(rec.dim);
  for (std::size_t ci = 0; ci < rec.comps.size(); ++ci) {
    const auto& c = rec.comps[ci];
    const int w = rec.where[ci];
    using Kind = LmiStructure::Kind;
    switch (c.kind) {
      case Kind::kBlock: {
        const int k = static_cast<int>(c.indices.size());
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b <= a; ++b) {
            z.at(c.indices[static_cast<std::size_t>(a)], c.indices[static_cast<std::size_t>(b)]) =
                value(sol, entry(w, a, b));
          }
        }
        break;
      }
      case Kind::kScalar: z.at(c.indices[0], c.indices[0]) = value(sol, w); break;
      case Kind::kPinned: {
        const double v = value(sol, w);
        z.at(c.indices[0], c.indices[0]) = std::max(v, 0.0);
        const int other = rec.comps[static_cast<std::size_t>(c.partner)].indices[0];
        z.at(other, other) = std::max(-v, 0.0);
        break;
      }
      case Kind::kPinnedPartner:
      case Kind::kEmpty: break;
    }
  }
  return z;
}

ConeSpec SdpBuilder::cone() const { return ConeSpec{psd_dims_, n_nonneg_, n_free_}; }

int SdpBuilder::scalar_index(const ConeSpec& cone, int var) const {
  const auto& v = vars_[static_cast<std::size_t>(var)];
  switch (v.kind) {
    case VarKind::kFree: return cone.free_index(v.block);
    case VarKind::kNonneg: return cone.nonneg_index(v.block);
    case VarKind::kPsdEntry: return cone.psd_index(v.block, v.i, v.j);
  }
  return -1;
}

LinearFunctional SdpBuilder::functional(const ConeSpec& cone, const LinExpr& e) const {
  LinearFunctional f;
  for (const auto& [var, c] : e.terms) {
    if (var < 0 || var >= var_count()) throw InvalidInput("unknown builder variable");
    const auto& v = vars_[static_cast<std::size_t>(var)];
    // functionals pair off-diagonal entries through the trace
    const double w = (v.kind == VarKind::kPsdEntry && v.i != v.j) ? 0.5 : 1.0;
    f.add(scalar_index(cone, var), w * c);
  }
  return f;
}

SdpProblem SdpBuilder::build() const {
  SdpProblem p;
  p.cone = cone();
  p.sense = sense_;
  p.objective = functional(p.cone, objective_);
  p.objective_offset = objective_.constant;
  for (const auto& [e, rhs] : eqs_) p.equalities.push_back({functional(p.cone, e), rhs - e.constant});
  for (const auto& [e, rhs, sense] : ineqs_) p.inequalities.push_back({functional(p.cone, e), rhs - e.constant, sense});
  return p;
}

double SdpBuilder::value(const SdpSolution& sol, int var) const {
  return sol.x.at(static_cast<std::size_t>(scalar_index(cone(), var)));
}

double SdpBuilder::ray_value(const SdpSolution& sol, int var) const {
  return sol.ray.at(static_cast<std::size_t>(scalar_index(cone(), var)));
}

SymMatrix SdpBuilder::lmi_dual(const SdpSolution& sol, int lmi) const {
  const auto& rec = lmis_[static_cast<std::size_t>(lmi)];
  const ConeSpec cs = cone();
  const double sign = sense_ == ObjectiveSense::kMinimize ? 1.0 : -1.0;
  SymMatrix z(rec.dim);
  for (std::size_t ci = 0; ci < rec.comps.size(); ++ci) {
    const auto& c = rec.comps[ci];
    const int w = rec.where[ci];
    using Kind = LmiStructure::Kind;
    switch (c.kind) {
      case Kind::kBlock: {
        const SymMatrix blk = sol.dual_slack_block(cs, w);
        const int k = static_cast<int>(c.indices.size());
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b <= a; ++b) z.at(c.indices[static_cast<std::size_t>(a)], c.indices[static_cast<std::size_t>(b)]) = blk(a, b);
        }
        break;
      }
      case Kind::kScalar:
        z.at(c.indices[0], c.indices[0]) = sign * sol.ineq_multipliers.at(static_cast<std::size_t>(w));
        break;
      case Kind::kPinned: {
        const double v = sign * sol.eq_multipliers.at(static_cast<std::size_t>(w));
        z.at(c.indices[0], c.indices[0]) = std::max(v, 0.0);
        const int other = rec.comps[static_cast<std::size_t>(c.partner)].indices[0];
        z.at(other, other) = std::max(-v, 0.0);
        break;
      }
      case Kind::kPinnedPartner:
      case Kind::kEmpty: break;
    }
  }
  return z;
}

}  // namespace sosrelax
