#include "mesmix/mip_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mesmix/error.hpp"

namespace mesmix {

namespace {

constexpr const char* kObjectiveRow = "COST";

std::vector<int> columns_by_name(const MipProgram& p) {
  std::vector<int> order(p.variables.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return p.variables[static_cast<std::size_t>(a)].name < p.variables[static_cast<std::size_t>(b)].name;
  });
  return order;
}

std::string format_number(double v, int max_width) {
  char buf[40];
  for (int precision = 17; precision >= 1; --precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (static_cast<int>(std::char_traits<char>::length(buf)) <= max_width) return buf;
  }
  return buf;
}

std::string lp_number(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return format_number(v, 40);
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t salt) {
  std::uint64_t h = 14695981039346656037ULL ^ salt;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string base36(std::uint64_t v, std::size_t width) {
  static const char* digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string out(width, '0');
  for (std::size_t i = width; i-- > 0;) {
    out[i] = digits[v % 36];
    v /= 36;
  }
  return out;
}

class NameTable {
 public:
  NameTable(bool hash, std::map<std::string, std::string>& reverse) : hash_(hash), reverse_(reverse) {}

  std::string operator()(const std::string& name, char prefix) {
    if (!hash_) {
      if (name.size() > kMpsNameWidth)
        throw NameTooLong("'" + name + "' exceeds the " + std::to_string(kMpsNameWidth) + "-character MPS field");
      if (name.find(' ') != std::string::npos) throw NameTooLong("'" + name + "' contains a space");
      return name;
    }
    const std::string key = std::string(1, prefix) + name;
    if (auto it = forward_.find(key); it != forward_.end()) return it->second;
    for (std::uint64_t salt = 0;; ++salt) {
      std::string h = prefix + base36(fnv1a(name, salt), kMpsNameWidth - 1);
      if (reverse_.count(h)) continue;
      reverse_[h] = name;
      forward_[key] = h;
      return h;
    }
  }

 private:
  bool hash_;
  std::map<std::string, std::string>& reverse_;
  std::map<std::string, std::string> forward_;
};

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

/// Fixed-format data line; fields start at columns 2, 5, 15, 25, 40 and 50.
std::string mps_line(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                     const std::string& f4 = {}, const std::string& f5 = {}, const std::string& f6 = {}) {
  std::string line = " " + pad(f1, 2) + " " + pad(f2, 8) + "  " + pad(f3, 8) + "  " + pad(f4, 12) + "   " +
                     pad(f5, 8) + "  " + f6;
  while (!line.empty() && line.back() == ' ') line.pop_back();
  return line + "\n";
}

const char* row_type(Sense s) {
  switch (s) {
    case Sense::le: return "L";
    case Sense::ge: return "G";
    case Sense::eq: return "E";
  }
  return "E";
}

}  // namespace

MpsExport export_mps(const MipProgram& p, const MpsOptions& options) {
  MpsExport out;
  NameTable names(options.hash_names, out.names);
  const std::vector<int> order = columns_by_name(p);
  std::vector<std::string> col(p.variables.size()), row(p.constraints.size());
  for (int j : order) col[static_cast<std::size_t>(j)] = names(p.variables[static_cast<std::size_t>(j)].name, 'C');
  for (std::size_t i = 0; i < p.constraints.size(); ++i) row[i] = names(p.constraints[i].name, 'R');
  const std::string model = p.name.empty() ? "MIP" : p.name;

  // Column-wise nonzeros.
  std::vector<std::vector<std::pair<std::size_t, double>>> entries(p.variables.size());
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    for (const auto& t : p.constraints[i].terms) entries[static_cast<std::size_t>(t.var)].emplace_back(i, t.coef);
  std::vector<double> cost(p.variables.size(), 0.0);
  for (const auto& t : p.objectives[0].terms) cost[static_cast<std::size_t>(t.var)] += t.coef;

  std::ostringstream s;
  s << "NAME          " << (options.hash_names ? names(model, 'N') : model) << "\n";
  s << "* objective row " << kObjectiveRow << " is f1 (costs)\n";
  for (int k = 1; k < 3; ++k) {
    const auto& f = p.objectives[static_cast<std::size_t>(k)];
    s << "* f" << k + 1 << (k == 1 ? " (emissions)" : " (negated CHP heat)") << " constant "
      << format_number(f.constant, 40) << "\n";
    for (const auto& t : f.terms)
      s << "*   " << format_number(t.coef, 40) << " " << col[static_cast<std::size_t>(t.var)] << "\n";
  }
  s << "ROWS\n";
  s << mps_line("N", kObjectiveRow);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) s << mps_line(row_type(p.constraints[i].sense), row[i]);

  s << "COLUMNS\n";
  bool in_integer = false;
  int marker = 0;
  for (int jj : order) {
    const auto j = static_cast<std::size_t>(jj);
    const bool integer = p.variables[j].binary;
    if (integer != in_integer) {
      const std::string tag = "M" + std::to_string(marker++);
      s << mps_line("", tag, "'MARKER'", "", integer ? "'INTORG'" : "'INTEND'");
      in_integer = integer;
    }
    std::vector<std::pair<std::string, double>> cells;
    if (cost[j] != 0.0 || entries[j].empty()) cells.emplace_back(kObjectiveRow, cost[j]);
    for (const auto& [i, v] : entries[j]) cells.emplace_back(row[i], v);
    for (std::size_t c = 0; c < cells.size(); c += 2) {
      if (c + 1 < cells.size())
        s << mps_line("", col[j], cells[c].first, format_number(cells[c].second, 12), cells[c + 1].first,
                      format_number(cells[c + 1].second, 12));
      else
        s << mps_line("", col[j], cells[c].first, format_number(cells[c].second, 12));
    }
  }
  if (in_integer) s << mps_line("", "M" + std::to_string(marker), "'MARKER'", "", "'INTEND'");

  s << "RHS\n";
  if (p.objectives[0].constant != 0.0)
    s << mps_line("", "RHS", kObjectiveRow, format_number(-p.objectives[0].constant, 12));
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    if (p.constraints[i].rhs != 0.0) s << mps_line("", "RHS", row[i], format_number(p.constraints[i].rhs, 12));

  s << "BOUNDS\n";
  for (int jj : order) {
    const auto j = static_cast<std::size_t>(jj);
    const auto& v = p.variables[j];
    if (v.binary && v.lower == 0.0 && v.upper == 1.0) {
      s << mps_line("BV", "BND", col[j]);
      continue;
    }
    if (v.lower == v.upper) {
      s << mps_line("FX", "BND", col[j], format_number(v.lower, 12));
      continue;
    }
    if (v.lower == -kInf && v.upper == kInf) {
      s << mps_line("FR", "BND", col[j]);
      continue;
    }
    if (v.lower == -kInf)
      s << mps_line("MI", "BND", col[j]);
    else if (v.lower != 0.0)
      s << mps_line("LO", "BND", col[j], format_number(v.lower, 12));
    if (v.upper != kInf) s << mps_line("UP", "BND", col[j], format_number(v.upper, 12));
  }
  s << "ENDATA\n";
  out.text = s.str();
  return out;
}

std::string name_map_json(const MpsExport& e) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["names"] = e.names;
  return doc.dump(2) + "\n";
}

namespace {

void write_expr(std::ostringstream& s, const MipProgram& p, const std::vector<Term>& terms) {
  int on_line = 0;
  for (const auto& t : terms) {
    if (on_line == 8) {
      s << "\n   ";
      on_line = 0;
    }
    s << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef), 40) << " "
      << p.variables[static_cast<std::size_t>(t.var)].name;
    ++on_line;
  }
}

const char* lp_sense(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "=";
}

}  // namespace

std::string export_lp(const MipProgram& p) {
  std::ostringstream s;
  s << "\\ " << (p.name.empty() ? "MIP" : p.name) << "\n";
  s << "\\ objective is f1 (costs)\n";
  for (int k = 1; k < 3; ++k) {
    const auto& f = p.objectives[static_cast<std::size_t>(k)];
    s << "\\ f" << k + 1 << " constant " << format_number(f.constant, 40) << ":";
    for (const auto& t : f.terms)
      s << " " << format_number(t.coef, 40) << " " << p.variables[static_cast<std::size_t>(t.var)].name;
    s << "\n";
  }
  s << "Minimize\n obj:";
  // Columns appear in name order through the first objective and the bounds section.
  std::vector<Term> obj = p.objectives[0].terms;
  std::sort(obj.begin(), obj.end(), [&](const Term& a, const Term& b) {
    return p.variables[static_cast<std::size_t>(a.var)].name < p.variables[static_cast<std::size_t>(b.var)].name;
  });
  write_expr(s, p, obj);
  if (p.objectives[0].constant != 0.0)
    s << (p.objectives[0].constant < 0 ? " - " : " + ") << format_number(std::abs(p.objectives[0].constant), 40);
  s << "\nSubject To\n";
  for (const auto& c : p.constraints) {
    s << " " << c.name << ":";
    if (c.terms.empty() && !p.variables.empty())
      s << " + 0 " << p.variables.front().name;
    else
      write_expr(s, p, c.terms);
    s << " " << lp_sense(c.sense) << " " << format_number(c.rhs, 40) << "\n";
  }
  s << "Bounds\n";
  const std::vector<int> order = columns_by_name(p);
  for (int jj : order) {
    const auto& v = p.variables[static_cast<std::size_t>(jj)];
    if (v.binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == 0.0 && v.upper == kInf) continue;
    if (v.lower == v.upper)
      s << " " << v.name << " = " << lp_number(v.lower) << "\n";
    else if (v.lower == -kInf && v.upper == kInf)
      s << " " << v.name << " free\n";
    else
      s << " " << lp_number(v.lower) << " <= " << v.name << " <= " << lp_number(v.upper) << "\n";
  }
  s << "Binaries\n";
  for (int jj : order) {
    const auto& v = p.variables[static_cast<std::size_t>(jj)];
    if (v.binary) s << " " << v.name << "\n";
  }
  // Columns without any appearance so far still need declaring.
  std::vector<char> seen(p.variables.size(), 0);
  for (const auto& t : p.objectives[0].terms) seen[static_cast<std::size_t>(t.var)] = 1;
  for (const auto& c : p.constraints)
    for (const auto& t : c.terms) seen[static_cast<std::size_t>(t.var)] = 1;
  std::ostringstream declared;
  for (int jj : order) {
    const auto& v = p.variables[static_cast<std::size_t>(jj)];
    if (!seen[static_cast<std::size_t>(jj)] && !v.binary && v.lower == 0.0 && v.upper == kInf)
      declared << " 0 <= " << v.name << " <= +inf\n";
  }
  std::string text = s.str();
  if (!declared.str().empty()) {
    const auto at = text.find("Binaries\n");
    text.insert(at, declared.str());
  }
  return text + "End\n";
}

// ---------------------------------------------------------------- readers

namespace {

double parse_number(const std::string& tok, const std::string& where) {
  std::string t = tok;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInf;
  if (t == "-inf" || t == "-infinity") return -kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InvalidInstance(where + ": expected a number, got '" + tok + "'");
  }
}

bool is_number(const std::string& tok) {
  if (tok.empty()) return false;
  const char c = tok[0];
  return std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
         ((c == '-' || c == '+') && tok.size() > 1 && (std::isdigit(static_cast<unsigned char>(tok[1])) || tok[1] == '.'));
}

int ensure_column(MipProgram& p, const std::string& name) {
  const int j = p.find(name);
  if (j >= 0) return j;
  return p.add_variable(MipVariable{name, VarFamily::flow_arc, false, 0.0, kInf});
}

}  // namespace

MipProgram read_mps(const std::string& text) {
  MipProgram p;
  std::istringstream in(text);
  std::string line, section;
  std::string objective;
  std::map<std::string, int> rows;
  std::vector<std::vector<Term>> row_terms;
  bool integer = false;
  std::set<int> bounded_upper;
  int line_no = 0;
  auto where = [&] { return "MPS line " + std::to_string(line_no); };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ') {
      section = tok[0];
      if (section == "NAME") p.name = tok.size() > 1 ? tok[1] : "";
      if (section == "ENDATA") break;
      if (section == "RANGES") throw InvalidInstance(where() + ": RANGES section is not supported");
      continue;
    }
    if (section == "ROWS") {
      if (tok.size() < 2) throw InvalidInstance(where() + ": row needs a type and a name");
      if (tok[0] == "N") {
        if (objective.empty()) objective = tok[1];
        continue;
      }
      LinearConstraint c;
      c.name = tok[1];
      if (tok[0] == "L")
        c.sense = Sense::le;
      else if (tok[0] == "G")
        c.sense = Sense::ge;
      else if (tok[0] == "E")
        c.sense = Sense::eq;
      else
        throw InvalidInstance(where() + ": unknown row type " + tok[0]);
      rows[c.name] = static_cast<int>(p.constraints.size());
      p.constraints.push_back(std::move(c));
      row_terms.emplace_back();
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        integer = tok.back() == "'INTORG'";
        continue;
      }
      if (tok.size() != 3 && tok.size() != 5) throw InvalidInstance(where() + ": malformed COLUMNS entry");
      const int j = ensure_column(p, tok[0]);
      if (integer) p.variables[static_cast<std::size_t>(j)].binary = true;
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        const double v = parse_number(tok[k + 1], where());
        if (tok[k] == objective) {
          if (v != 0.0) p.objectives[0].terms.push_back(Term{j, v});
          continue;
        }
        auto it = rows.find(tok[k]);
        if (it == rows.end()) throw InvalidInstance(where() + ": unknown row " + tok[k]);
        row_terms[static_cast<std::size_t>(it->second)].push_back(Term{j, v});
      }
    } else if (section == "RHS") {
      if (tok.size() != 3 && tok.size() != 5) throw InvalidInstance(where() + ": malformed RHS entry");
      for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
        const double v = parse_number(tok[k + 1], where());
        if (tok[k] == objective) {
          p.objectives[0].constant = -v;
          continue;
        }
        auto it = rows.find(tok[k]);
        if (it == rows.end()) throw InvalidInstance(where() + ": unknown row " + tok[k]);
        p.constraints[static_cast<std::size_t>(it->second)].rhs = v;
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) throw InvalidInstance(where() + ": malformed BOUNDS entry");
      const int j = p.find(tok[2]);
      if (j < 0) throw InvalidInstance(where() + ": unknown column " + tok[2]);
      auto& v = p.variables[static_cast<std::size_t>(j)];
      const std::string& type = tok[0];
      const double value = tok.size() > 3 ? parse_number(tok[3], where()) : 0.0;
      if (type == "UP") {
        v.upper = value;
      } else if (type == "LO") {
        v.lower = value;
      } else if (type == "FX") {
        v.lower = v.upper = value;
      } else if (type == "FR") {
        v.lower = -kInf;
        v.upper = kInf;
      } else if (type == "MI") {
        v.lower = -kInf;
      } else if (type == "PL") {
        v.upper = kInf;
      } else if (type == "BV") {
        v.binary = true;
        v.lower = 0.0;
        v.upper = 1.0;
      } else {
        throw InvalidInstance(where() + ": unsupported bound type " + type);
      }
    }
  }
  // Rebuild rows through add_constraint semantics without re-registering names.
  std::vector<LinearConstraint> cs = std::move(p.constraints);
  p.constraints.clear();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    cs[i].terms = std::move(row_terms[i]);
    p.add_constraint(std::move(cs[i]));
  }
  return p;
}

MipProgram read_lp(const std::string& text) {
  MipProgram p;
  std::vector<std::string> tok;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
      std::istringstream ls(line);
      for (std::string t; ls >> t;) tok.push_back(t);
    }
  }
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  auto is_section = [&](std::size_t i) {
    const std::string t = lower(tok[i]);
    if (t == "minimize" || t == "minimise" || t == "min" || t == "bounds" || t == "binaries" || t == "binary" ||
        t == "bin" || t == "end" || t == "st" || t == "s.t.")
      return true;
    return t == "subject" && i + 1 < tok.size() && lower(tok[i + 1]) == "to";
  };
  auto is_sense = [](const std::string& t) { return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">"; };
  auto to_sense = [](const std::string& t) {
    if (t == "<=" || t == "=<" || t == "<") return Sense::le;
    if (t == ">=" || t == "=>" || t == ">") return Sense::ge;
    return Sense::eq;
  };

  std::size_t i = 0;
  auto fail = [&](const std::string& what) -> void {
    throw InvalidInstance("LP token " + std::to_string(i) + ": " + what);
  };

  // Linear expression until a sense token or a section keyword.
  auto read_expr = [&](LinearExpr& e) {
    double sign = 1.0;
    bool dangling = false;
    while (i < tok.size() && !is_sense(tok[i]) && !is_section(i)) {
      const std::string& t = tok[i];
      if (t == "+" || t == "-") {
        if (t == "-") sign = -sign;
        dangling = true;
        ++i;
        continue;
      }
      dangling = false;
      if (!t.empty() && t.back() == ':') break;
      double coef = 1.0;
      if (is_number(t)) {
        coef = parse_number(t, "LP");
        ++i;
        if (i >= tok.size() || is_sense(tok[i]) || is_section(i) || tok[i] == "+" || tok[i] == "-") {
          e.constant += sign * coef;
          sign = 1.0;
          continue;
        }
      }
      const int j = ensure_column(p, tok[i]);
      e.terms.push_back(Term{j, sign * coef});
      sign = 1.0;
      ++i;
    }
    if (dangling) fail("expression ends with an operator");
  };

  std::string section;
  while (i < tok.size()) {
    if (is_section(i)) {
      section = lower(tok[i]);
      if (section == "subject") ++i;
      if (section == "st" || section == "s.t.") section = "subject";
      if (section == "minimise" || section == "min") section = "minimize";
      if (section == "binary" || section == "bin") section = "binaries";
      ++i;
      if (section == "end") break;
      continue;
    }
    if (section == "minimize") {
      if (!tok[i].empty() && tok[i].back() == ':') ++i;
      LinearExpr e;
      read_expr(e);
      p.objectives[0] = std::move(e);
    } else if (section == "subject") {
      LinearConstraint c;
      if (!tok[i].empty() && tok[i].back() == ':') {
        c.name = tok[i].substr(0, tok[i].size() - 1);
        ++i;
      } else {
        c.name = "R" + std::to_string(p.constraints.size());
      }
      LinearExpr e;
      read_expr(e);
      if (i + 1 >= tok.size() || !is_sense(tok[i])) fail("constraint " + c.name + " lacks a sense");
      c.sense = to_sense(tok[i]);
      c.rhs = parse_number(tok[i + 1], "LP") - e.constant;
      i += 2;
      c.terms = std::move(e.terms);
      p.add_constraint(std::move(c));
    } else if (section == "bounds") {
      // forms: lo <= x <= up | x = v | x free | x <= v | x >= v | lo <= x
      if (i + 1 < tok.size() && lower(tok[i + 1]) == "free") {
        auto& v = p.variables[static_cast<std::size_t>(ensure_column(p, tok[i]))];
        v.lower = -kInf;
        v.upper = kInf;
        i += 2;
      } else if (is_number(tok[i]) || lower(tok[i]).find("inf") != std::string::npos) {
        const double lo = parse_number(tok[i], "LP");
        if (i + 2 >= tok.size() || !is_sense(tok[i + 1])) fail("malformed bound");
        auto& v = p.variables[static_cast<std::size_t>(ensure_column(p, tok[i + 2]))];
        v.lower = lo;
        i += 3;
        if (i + 1 < tok.size() && is_sense(tok[i])) {
          v.upper = parse_number(tok[i + 1], "LP");
          i += 2;
        }
      } else {
        if (i + 2 >= tok.size() || !is_sense(tok[i + 1])) fail("malformed bound");
        auto& v = p.variables[static_cast<std::size_t>(ensure_column(p, tok[i]))];
        const double value = parse_number(tok[i + 2], "LP");
        switch (to_sense(tok[i + 1])) {
          case Sense::le: v.upper = value; break;
          case Sense::ge: v.lower = value; break;
          case Sense::eq: v.lower = v.upper = value; break;
        }
        i += 3;
      }
    } else if (section == "binaries") {
      auto& v = p.variables[static_cast<std::size_t>(ensure_column(p, tok[i]))];
      v.binary = true;
      v.lower = 0.0;
      v.upper = 1.0;
      ++i;
    } else {
      fail("content outside any section: '" + tok[i] + "'");
    }
  }
  return p;
}

}  // namespace mesmix
