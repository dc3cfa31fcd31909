#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ttw {

enum class VarKind {
  kTime,     // integer time on the synthesis grid
  kBinary,
  kInteger,  // bounded counter
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kInteger;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var = 0;
  std::int64_t coef = 0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  std::int64_t rhs = 0;
};

// Pure integer program, always minimized. Every variable is integral and
// bounded; coefficients are exact integers.
struct IlpInstance {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;
  std::int64_t objective_constant = 0;

  int add_variable(std::string name, VarKind kind, std::int64_t lower,
                   std::int64_t upper);
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::kBinary, 0, 1); }
  void add_constraint(std::string name, std::vector<Term> terms, Relation rel,
                      std::int64_t rhs);

  std::size_t count_kind(VarKind kind) const;
};

// Exact integer evaluation, independent of any relaxation.
std::int64_t evaluate_objective(const IlpInstance& ilp, std::span<const std::int64_t> values);
bool satisfies(const IlpInstance& ilp, std::span<const std::int64_t> values,
               std::string* first_violation = nullptr);

// CPLEX LP text format. Output depends only on the instance, so identical
// instances give identical bytes.
std::string to_lp_format(const IlpInstance& ilp);

}  // namespace ttw
