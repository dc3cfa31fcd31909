#include "ttw/ilp.hpp"

#include <algorithm>
#include <stdexcept>

namespace ttw {

namespace {
__extension__ typedef __int128 Wide;
}  // namespace

int IlpInstance::add_variable(std::string name, VarKind kind, std::int64_t lower,
                              std::int64_t upper) {
  variables.push_back(Variable{std::move(name), kind, lower, upper});
  return static_cast<int>(variables.size() - 1);
}

void IlpInstance::add_constraint(std::string name, std::vector<Term> terms,
                                 Relation rel, std::int64_t rhs) {
  // Merge repeated variables so every row mentions each column once.
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(variables.size())) {
      throw std::out_of_range("constraint '" + name + "' references unknown variable");
    }
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0; });
  constraints.push_back(Constraint{std::move(name), std::move(merged), rel, rhs});
}

std::size_t IlpInstance::count_kind(VarKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      variables.begin(), variables.end(), [&](const Variable& v) { return v.kind == kind; }));
}

std::int64_t evaluate_objective(const IlpInstance& ilp, std::span<const std::int64_t> values) {
  Wide sum = ilp.objective_constant;
  for (const auto& t : ilp.objective) sum += static_cast<Wide>(t.coef) * values[t.var];
  return static_cast<std::int64_t>(sum);
}

bool satisfies(const IlpInstance& ilp, std::span<const std::int64_t> values,
               std::string* first_violation) {
  auto fail = [&](const std::string& why) {
    if (first_violation != nullptr) *first_violation = why;
    return false;
  };
  if (values.size() != ilp.variables.size()) return fail("assignment size mismatch");
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& v = ilp.variables[j];
    if (values[j] < v.lower || values[j] > v.upper) {
      return fail("variable " + v.name + " out of bounds");
    }
  }
  for (const auto& c : ilp.constraints) {
    Wide lhs = 0;
    for (const auto& t : c.terms) lhs += static_cast<Wide>(t.coef) * values[t.var];
    bool ok = true;
    switch (c.relation) {
      case Relation::kLessEqual: ok = lhs <= c.rhs; break;
      case Relation::kEqual: ok = lhs == c.rhs; break;
      case Relation::kGreaterEqual: ok = lhs >= c.rhs; break;
    }
    if (!ok) return fail("constraint " + c.name + " violated");
  }
  return true;
}

}  // namespace ttw
