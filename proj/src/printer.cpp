#include <sstream>

#include "islarr/syntax.hpp"

namespace islarr {

std::string to_string(const Term& t) {
  switch (t.kind()) {
    case TermKind::Null:
      return "null";
    case TermKind::Nat:
      return std::to_string(t.nat_value());
    case TermKind::Var:
      return t.name();
    case TermKind::Add: {
      auto r = to_string(t.rhs());
      if (t.rhs().kind() == TermKind::Add) r = "(" + r + ")";
      return to_string(t.lhs()) + " + " + r;
    }
    case TermKind::Base:
      return "b(" + to_string(t.arg()) + ")";
    case TermKind::End:
      return "e(" + to_string(t.arg()) + ")";
  }
  return "?";
}

namespace {

const char* op_text(PureOp op) {
  switch (op) {
    case PureOp::Eq:
      return "==";
    case PureOp::Neq:
      return "!=";
    case PureOp::Le:
      return "<=";
    case PureOp::Lt:
      return "<";
  }
  return "?";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string to_string(const PureAtom& p) {
  return to_string(p.lhs) + " " + op_text(p.op) + " " + to_string(p.rhs);
}

std::string to_string(const PureFormula& p) {
  std::vector<std::string> parts;
  for (auto& a : p) parts.push_back(to_string(a));
  return parts.empty() ? "emp" : join(parts, " * ");
}

std::string to_string(const SpatialAtom& s) {
  switch (s.kind) {
    case SpatialKind::Emp:
      return "emp";
    case SpatialKind::PointsTo:
      return to_string(s.a) + " |-> " + to_string(s.b);
    case SpatialKind::Arr:
      return "arr(" + to_string(s.a) + ", " + to_string(s.b) + ")";
    case SpatialKind::NegArr:
      return "narr(" + to_string(s.a) + ", " + to_string(s.b) + ")";
  }
  return "?";
}

std::string to_string(const SymbolicHeap& h) {
  std::vector<std::string> parts;
  for (auto& s : h.spatial) parts.push_back(to_string(s));
  for (auto& p : h.pure) parts.push_back(to_string(p));
  return parts.empty() ? "emp" : join(parts, " * ");
}

std::string to_string(const Disjunct& d) {
  if (d.vars.empty()) return to_string(d.body);
  return "exists " + join(d.vars, " ") + ". " + to_string(d.body);
}

std::string to_string(const Assertion& a) {
  if (a.disjuncts.empty()) return "false";
  std::vector<std::string> parts;
  for (auto& d : a.disjuncts) parts.push_back(to_string(d));
  return join(parts, "\n  \\/ ");
}

namespace {

void print_cmd(const Command& c, std::ostringstream& os);

void print_braced(const Command& c, std::ostringstream& os) {
  os << "{ ";
  print_cmd(c, os);
  os << " }";
}

void print_cmd(const Command& c, std::ostringstream& os) {
  switch (c.kind()) {
    case CmdKind::Skip:
      os << "skip";
      return;
    case CmdKind::Error:
      os << "error()";
      return;
    case CmdKind::Assign:
      os << c.var() << " := " << to_string(c.term());
      return;
    case CmdKind::Havoc:
      os << c.var() << " := *";
      return;
    case CmdKind::Assume:
      os << "assume(" << to_string(c.cond()) << ")";
      return;
    case CmdKind::Local:
      os << "local " << c.var() << " in ";
      print_braced(c.first(), os);
      return;
    case CmdKind::LocalInit:
      os << "local " << c.var() << " := " << to_string(c.term()) << " in ";
      print_braced(c.first(), os);
      return;
    case CmdKind::Seq: {
      // ';' associates to the left when parsed
      print_cmd(c.first(), os);
      os << "; ";
      if (c.second().kind() == CmdKind::Seq) print_braced(c.second(), os);
      else print_cmd(c.second(), os);
      return;
    }
    case CmdKind::Choice:
      print_braced(c.first(), os);
      os << " + ";
      print_braced(c.second(), os);
      return;
    case CmdKind::Star:
      print_braced(c.first(), os);
      os << "*";
      return;
    case CmdKind::Alloc:
      os << c.var() << " := alloc(" << to_string(c.term()) << ")";
      return;
    case CmdKind::Free:
      os << "free(" << to_string(c.term()) << ")";
      return;
    case CmdKind::Load:
      os << c.var() << " := [" << to_string(c.term()) << "]";
      return;
    case CmdKind::Store:
      os << "[" << to_string(c.term()) << "] := " << to_string(c.term2());
      return;
  }
}

}  // namespace

std::string to_string(const Command& c) {
  std::ostringstream os;
  print_cmd(c, os);
  return os.str();
}

}  // namespace islarr
