#include <cctype>
#include <set>
#include <sstream>

#include "ttw/ilp.hpp"

namespace ttw {

namespace {

constexpr int kTermsPerLine = 8;

std::string sanitize(const std::string& raw) {
  std::string out;
  out.reserve(raw.size() + 1);
  for (char c : raw) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) {
    out.insert(out.begin(), '_');
  }
  return out;
}

std::vector<std::string> unique_names(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& r : raw) {
    std::string name = sanitize(r);
    std::string candidate = name;
    for (int k = 1; used.count(candidate); ++k) candidate = name + "_" + std::to_string(k);
    used.insert(candidate);
    out.push_back(candidate);
  }
  return out;
}

void write_terms(std::ostringstream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (i > 0 && i % kTermsPerLine == 0) out << "\n   ";
    if (i == 0) {
      out << ' ' << t.coef << ' ' << names[t.var];
    } else {
      out << (t.coef < 0 ? " - " : " + ") << (t.coef < 0 ? -t.coef : t.coef) << ' '
          << names[t.var];
    }
  }
}

void write_name_list(std::ostringstream& out, const std::vector<int>& vars,
                     const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    out << (i % kTermsPerLine == 0 ? "\n " : " ") << names[vars[i]];
  }
  out << '\n';
}

}  // namespace

std::string to_lp_format(const IlpInstance& ilp) {
  std::vector<std::string> raw_vars;
  for (const auto& v : ilp.variables) raw_vars.push_back(v.name);
  const auto vars = unique_names(raw_vars);
  std::vector<std::string> raw_rows;
  for (const auto& c : ilp.constraints) raw_rows.push_back(c.name);
  const auto rows = unique_names(raw_rows);

  std::ostringstream out;
  out << "\\ ttw integer program: " << ilp.variables.size() << " variables, "
      << ilp.constraints.size() << " constraints\n";
  out << "Minimize\n obj:";
  write_terms(out, ilp.objective, vars);
  if (ilp.objective_constant != 0) {
    out << (ilp.objective_constant < 0 ? " - " : " + ")
        << (ilp.objective_constant < 0 ? -ilp.objective_constant : ilp.objective_constant);
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < ilp.constraints.size(); ++i) {
    const auto& c = ilp.constraints[i];
    const char* rel = c.relation == Relation::kLessEqual  ? "<="
                      : c.relation == Relation::kEqual ? "="
                                                       : ">=";
    if (c.terms.empty()) {
      if (ilp.variables.empty()) {
        out << "\\ " << rows[i] << ": 0 " << rel << ' ' << c.rhs << '\n';
        continue;
      }
      out << ' ' << rows[i] << ": 0 " << vars[0] << ' ' << rel << ' ' << c.rhs << '\n';
      continue;
    }
    out << ' ' << rows[i] << ':';
    write_terms(out, c.terms, vars);
    out << ' ' << rel << ' ' << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < ilp.variables.size(); ++j) {
    const auto& v = ilp.variables[j];
    out << ' ' << v.lower << " <= " << vars[j] << " <= " << v.upper << '\n';
  }
  std::vector<int> generals;
  std::vector<int> binaries;
  for (std::size_t j = 0; j < ilp.variables.size(); ++j) {
    (ilp.variables[j].kind == VarKind::kBinary ? binaries : generals)
        .push_back(static_cast<int>(j));
  }
  out << "Generals";
  write_name_list(out, generals, vars);
  out << "Binaries";
  write_name_list(out, binaries, vars);
  out << "End\n";
  return out.str();
}

}  // namespace ttw
