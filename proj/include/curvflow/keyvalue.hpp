#pragma once

// "key = value" text shared by problem definitions and run configs.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvflow/problem.hpp"

namespace curvflow::kv {

struct Entry {
  std::string value;
  int line = 0;
};

/// Parsed document. Every key must be consumed exactly once before finish().
class Reader {
 public:
  explicit Reader(std::istream& in);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<Entry> take(const std::string& key);
  Entry require(const std::string& key);

  double real(const std::string& key);
  double real_or(const std::string& key, double fallback);
  long long integer(const std::string& key);
  long long integer_or(const std::string& key, long long fallback);
  std::string text(const std::string& key);
  std::string text_or(const std::string& key, std::string fallback);

  /// Throws ParseError on the first key nobody asked for.
  void finish() const;

 private:
  std::map<std::string, Entry> entries_;
};

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);
/// Strict: the whole token must be a number.
double parse_real(const std::string& token, int line, const std::string& field);
long long parse_integer(const std::string& token, int line, const std::string& field);

/// "s:v, s:v, ..."
std::vector<std::pair<double, double>> parse_table(const Entry& e, const std::string& field);
std::string format_table(const std::vector<std::pair<double, double>>& samples);

/// "0.1*x3, 0.05*x1^2*x2"
std::vector<MonomialTerm> parse_terms(const Entry& e, const std::string& field);
std::string format_terms(const std::vector<MonomialTerm>& terms);

/// The problem keys (n, k, phi.*, g.*, f.*, vartheta).
ProblemDefinition read_problem(Reader& r);
void write_problem(std::ostream& out, const ProblemDefinition& def);

}  // namespace curvflow::kv
