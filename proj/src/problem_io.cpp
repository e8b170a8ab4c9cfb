#include <charconv>
#include <istream>
#include <sstream>

#include "curvflow/errors.hpp"
#include "curvflow/keyvalue.hpp"
#include "curvflow/problem.hpp"

namespace curvflow {
namespace kv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

Reader::Reader(std::istream& in) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected 'key = value'", line, body);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line) + ": empty key", line, key);
    if (entries_.count(key)) throw ParseError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line, key);
    entries_[key] = Entry{value, line};
  }
}

std::optional<Entry> Reader::take(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  Entry e = it->second;
  entries_.erase(it);
  return e;
}

Entry Reader::require(const std::string& key) {
  auto e = take(key);
  if (!e) throw ParseError("missing field '" + key + "'", 0, key);
  return *e;
}

double Reader::real(const std::string& key) {
  const Entry e = require(key);
  return parse_real(e.value, e.line, key);
}

double Reader::real_or(const std::string& key, double fallback) {
  const auto e = take(key);
  return e ? parse_real(e->value, e->line, key) : fallback;
}

long long Reader::integer(const std::string& key) {
  const Entry e = require(key);
  return parse_integer(e.value, e.line, key);
}

long long Reader::integer_or(const std::string& key, long long fallback) {
  const auto e = take(key);
  return e ? parse_integer(e->value, e->line, key) : fallback;
}

std::string Reader::text(const std::string& key) { return require(key).value; }

std::string Reader::text_or(const std::string& key, std::string fallback) {
  const auto e = take(key);
  return e ? e->value : fallback;
}

void Reader::finish() const {
  if (entries_.empty()) return;
  const auto& [key, e] = *entries_.begin();
  throw ParseError("line " + std::to_string(e.line) + ": unknown field '" + key + "'", e.line, key);
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& token, int line, const std::string& field) {
  double v = 0.0;
  const char* b = token.data();
  const char* e = b + token.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) {
    throw ParseError("line " + std::to_string(line) + ": '" + field + "' expects a number, got '" + token + "'", line,
                     field);
  }
  return v;
}

long long parse_integer(const std::string& token, int line, const std::string& field) {
  long long v = 0;
  const char* b = token.data();
  const char* e = b + token.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) {
    throw ParseError("line " + std::to_string(line) + ": '" + field + "' expects an integer, got '" + token + "'",
                     line, field);
  }
  return v;
}

std::vector<std::pair<double, double>> parse_table(const Entry& e, const std::string& field) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : split(e.value, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ParseError("line " + std::to_string(e.line) + ": table entries are 's:v'", e.line, field);
    }
    out.emplace_back(parse_real(trim(item.substr(0, colon)), e.line, field),
                     parse_real(trim(item.substr(colon + 1)), e.line, field));
  }
  return out;
}

std::string format_table(const std::vector<std::pair<double, double>>& samples) {
  std::string out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i) out += ", ";
    out += format_real(samples[i].first) + ":" + format_real(samples[i].second);
  }
  return out;
}

std::vector<MonomialTerm> parse_terms(const Entry& e, const std::string& field) {
  std::vector<MonomialTerm> out;
  if (e.value.empty()) return out;
  for (const std::string& item : split(e.value, ',')) {
    const std::vector<std::string> factors = split(item, '*');
    MonomialTerm t;
    t.coef = parse_real(factors[0], e.line, field);
    for (std::size_t j = 1; j < factors.size(); ++j) {
      const std::string& f = factors[j];
      const auto bad = [&] {
        return ParseError("line " + std::to_string(e.line) + ": bad monomial factor '" + f + "'", e.line, field);
      };
      if (f.size() < 2 || f[0] != 'x' || f[1] < '1' || f[1] > '3') throw bad();
      int power = 1;
      if (f.size() > 2) {
        if (f[2] != '^') throw bad();
        power = static_cast<int>(parse_integer(f.substr(3), e.line, field));
        if (power < 1) throw bad();
      }
      t.powers[static_cast<std::size_t>(f[1] - '1')] += power;
    }
    out.push_back(t);
  }
  return out;
}

std::string format_terms(const std::vector<MonomialTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ", ";
    out += format_real(terms[i].coef);
    for (int a = 0; a < 3; ++a) {
      const int p = terms[i].powers[static_cast<std::size_t>(a)];
      if (p == 0) continue;
      out += "*x" + std::to_string(a + 1);
      if (p != 1) out += "^" + std::to_string(p);
    }
  }
  return out;
}

ProblemDefinition read_problem(Reader& r) {
  ProblemDefinition def;
  def.n = static_cast<int>(r.integer("n"));
  def.k = static_cast<int>(r.integer("k"));

  const Entry phi_kind = r.require("phi.kind");
  if (phi_kind.value == "power") {
    def.phi = PhiSpec::power(r.real("phi.p"));
  } else if (phi_kind.value == "table") {
    def.phi = PhiSpec::table(parse_table(r.require("phi.table"), "phi.table"));
  } else {
    throw ParseError("line " + std::to_string(phi_kind.line) + ": phi.kind must be power or table", phi_kind.line,
                     "phi.kind");
  }

  const Entry g_kind = r.require("g.kind");
  if (g_kind.value == "constant") {
    def.g = GSpec::constant();
  } else if (g_kind.value == "radial_power") {
    def.g = GSpec::radial_power(r.real("g.q"), def.n);
  } else if (g_kind.value == "radial_table") {
    def.g = GSpec::radial_table(parse_table(r.require("g.table"), "g.table"));
  } else {
    throw ParseError("line " + std::to_string(g_kind.line) + ": g.kind must be constant, radial_power or radial_table",
                     g_kind.line, "g.kind");
  }

  const Entry f_kind = r.require("f.kind");
  def.f.base = r.real("f.base");
  if (f_kind.value == "constant") {
    def.f.kind = FieldExpr::Kind::constant;
  } else if (f_kind.value == "harmonic-perturbation") {
    def.f.kind = FieldExpr::Kind::harmonic_perturbation;
    def.f.terms = parse_terms(r.require("f.terms"), "f.terms");
  } else {
    throw ParseError("line " + std::to_string(f_kind.line) + ": f.kind must be constant or harmonic-perturbation",
                     f_kind.line, "f.kind");
  }

  def.vartheta = r.real("vartheta");
  return def;
}

void write_problem(std::ostream& out, const ProblemDefinition& def) {
  out << "n = " << def.n << '\n';
  out << "k = " << def.k << '\n';
  if (def.phi.kind() == PhiSpec::Kind::power) {
    out << "phi.kind = power\nphi.p = " << format_real(def.phi.p()) << '\n';
  } else {
    out << "phi.kind = table\nphi.table = " << format_table(def.phi.samples()) << '\n';
  }
  switch (def.g.kind()) {
    case GSpec::Kind::constant:
      out << "g.kind = constant\n";
      break;
    case GSpec::Kind::radial_power:
      out << "g.kind = radial_power\ng.q = " << format_real(def.g.q()) << '\n';
      break;
    case GSpec::Kind::radial_table:
      out << "g.kind = radial_table\ng.table = " << format_table(def.g.samples()) << '\n';
      break;
  }
  if (def.f.kind == FieldExpr::Kind::constant) {
    out << "f.kind = constant\nf.base = " << format_real(def.f.base) << '\n';
  } else {
    out << "f.kind = harmonic-perturbation\nf.base = " << format_real(def.f.base) << "\nf.terms = "
        << format_terms(def.f.terms) << '\n';
  }
  out << "vartheta = " << format_real(def.vartheta) << '\n';
}

}  // namespace kv

ProblemDefinition parse_problem(std::istream& in) {
  kv::Reader r(in);
  ProblemDefinition def = kv::read_problem(r);
  r.finish();
  return def;
}

ProblemDefinition parse_problem_text(const std::string& text) {
  std::istringstream in(text);
  return parse_problem(in);
}

std::string serialize_problem(const ProblemDefinition& def) {
  std::ostringstream out;
  kv::write_problem(out, def);
  return out.str();
}

}  // namespace curvflow
