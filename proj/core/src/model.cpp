#include "kktcert/model.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace kktcert {

ProblemFormatError::ProblemFormatError(const std::string& what, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  std::size_t h = s.find('#');
  return h == std::string::npos ? s : s.substr(0, h);
}

double parse_real(const std::string& tok, int line) {
  const std::string t = strip(tok);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ProblemFormatError("malformed number '" + t + "'", line);
  return v;
}

// box = [lo,hi] x [lo,hi] x ...
void parse_box(const std::string& rhs, int line, Vec& lo, Vec& hi) {
  std::size_t pos = 0;
  const std::string s = rhs;
  auto skip_ws = [&]() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  };
  bool first = true;
  for (;;) {
    skip_ws();
    if (pos >= s.size()) break;
    if (!first) {
      if (s[pos] != 'x') throw ProblemFormatError("expected 'x' between box intervals", line);
      ++pos;
      skip_ws();
    }
    first = false;
    if (pos >= s.size() || s[pos] != '[')
      throw ProblemFormatError("expected '[' in box", line);
    std::size_t comma = s.find(',', pos);
    std::size_t close = s.find(']', pos);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw ProblemFormatError("malformed box interval", line);
    double l = parse_real(s.substr(pos + 1, comma - pos - 1), line);
    double h = parse_real(s.substr(comma + 1, close - comma - 1), line);
    if (!(l < h))
      throw ProblemFormatError("box interval must have lower < upper", line);
    lo.push_back(l);
    hi.push_back(h);
    pos = close + 1;
  }
  if (lo.empty()) throw ProblemFormatError("empty box", line);
}

}  // namespace

Problem load_problem(const std::string& text) {
  Problem p;
  bool have_n = false, have_box = false, have_objective = false;
  bool in_constraints = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;

    if (!in_constraints) {
      if (line.rfind("n", 0) == 0 && line.find('=') != std::string::npos &&
          strip(line.substr(0, line.find('='))) == "n") {
        std::string rhs = strip(line.substr(line.find('=') + 1));
        int n = 0;
        auto res = std::from_chars(rhs.data(), rhs.data() + rhs.size(), n);
        if (res.ec != std::errc() || res.ptr != rhs.data() + rhs.size() || n < 1)
          throw ProblemFormatError("malformed dimension '" + rhs + "'", line_no);
        p.n = n;
        have_n = true;
        continue;
      }
      if (line.rfind("box", 0) == 0 && line.find('=') != std::string::npos) {
        parse_box(strip(line.substr(line.find('=') + 1)), line_no, p.box_lo, p.box_hi);
        have_box = true;
        continue;
      }
      if (line.rfind("minimize:", 0) == 0) {
        if (!have_n) throw ProblemFormatError("'n = ...' must precede the objective", line_no);
        std::string body = strip(line.substr(9));
        try {
          p.objective = parse_expr(body, p.n);
        } catch (const ParseError& e) {
          throw ProblemFormatError(std::string("objective: ") + e.what(), line_no);
        }
        have_objective = true;
        continue;
      }
      if (line == "subject_to:") {
        in_constraints = true;
        continue;
      }
      throw ProblemFormatError("unrecognized directive '" + line + "'", line_no);
    }

    // constraint line: <expr> <= 0
    std::size_t le = line.find("<=");
    if (le == std::string::npos)
      throw ProblemFormatError("constraint must have the form '<expr> <= 0'", line_no);
    if (strip(line.substr(le + 2)) != "0")
      throw ProblemFormatError("constraint right-hand side must be 0", line_no);
    if (!have_n) throw ProblemFormatError("'n = ...' must precede constraints", line_no);
    try {
      p.constraints.push_back(parse_expr(strip(line.substr(0, le)), p.n));
    } catch (const ParseError& e) {
      throw ProblemFormatError(std::string("constraint: ") + e.what(), line_no);
    }
  }

  if (!have_n) throw ProblemFormatError("missing 'n = ...'", line_no);
  if (!have_box) throw ProblemFormatError("missing 'box = ...'", line_no);
  if (!have_objective) throw ProblemFormatError("missing 'minimize: ...'", line_no);
  if (p.constraints.empty())
    throw ProblemFormatError("at least one constraint is required", line_no);
  if (static_cast<int>(p.box_lo.size()) != p.n)
    throw ProblemFormatError("box has " + std::to_string(p.box_lo.size()) +
                                 " intervals for dimension " + std::to_string(p.n),
                             line_no);
  return p;
}

Problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_problem(buf.str());
}

ValidationReport validate(const Problem& p) {
  ValidationReport r;
  auto note = [&](const std::string& msg) {
    r.ok = false;
    r.messages.push_back(msg);
  };

  if (p.n < 1) note("dimension must be at least 1");
  if (p.constraints.empty()) note("constraint list is empty");
  if (static_cast<int>(p.box_lo.size()) != p.n ||
      static_cast<int>(p.box_hi.size()) != p.n)
    note("box does not match dimension");
  for (std::size_t i = 0; i < p.box_lo.size(); ++i)
    if (!(p.box_lo[i] < p.box_hi[i]))
      note("box interval " + std::to_string(i + 1) + " has lower >= upper");

  if (max_variable_index(p.objective) > p.n)
    note("objective references a variable beyond the dimension");
  for (int j = 0; j < p.m(); ++j)
    if (max_variable_index(p.constraints[j]) > p.n)
      note("constraint " + std::to_string(j + 1) +
           " references a variable beyond the dimension");

  if (r.ok) {
    Vec center(p.n);
    for (int i = 0; i < p.n; ++i)
      center[i] = 0.5 * (p.box_lo[i] + p.box_hi[i]);
    try {
      evaluate(p.objective, center);
    } catch (const EvalDomainError& e) {
      note(std::string("objective not evaluable at box center: ") + e.what());
    }
    for (int j = 0; j < p.m(); ++j) {
      try {
        evaluate(p.constraints[j], center);
      } catch (const EvalDomainError& e) {
        note("constraint " + std::to_string(j + 1) +
             " not evaluable at box center: " + e.what());
      }
    }
  }
  return r;
}

}  // namespace kktcert
