#include "plap/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace plap {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void dump_into(const json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        newline(depth + 1);
        dump_into(v[k], indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? format_real(x) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_json(const json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  return out;
}

json domain_to_json(const Domain& domain) {
  json d;
  d["kind"] = to_string(domain.kind());
  d["extents"] = domain.extents();
  d["dimension"] = domain.ambient_dimension();
  d["cells"] = domain.cells_x();
  return d;
}

DomainPtr domain_from_json(const json& d) {
  const auto kind = domain_kind_from_string(d.at("kind").get<std::string>());
  const auto extents = d.at("extents").get<std::vector<double>>();
  const auto cells = d.at("cells").get<Index>();
  switch (kind) {
    case DomainKind::interval:
      return Domain::interval(extents.at(0), cells);
    case DomainKind::rectangle:
      return Domain::rectangle(extents.at(0), extents.at(1), cells);
    case DomainKind::radial_ball:
      return Domain::radial_ball(extents.at(0), d.at("dimension").get<int>(), cells);
  }
  throw std::invalid_argument("unreachable domain kind");
}

json field_to_json(const ScalarField& field) {
  json j;
  j["domain"] = domain_to_json(field.domain());
  j["h"] = field.domain().h();
  j["dirichlet"] = field.dirichlet();
  const Vector& v = field.values();
  j["values"] = std::vector<double>(v.data(), v.data() + v.size());
  return j;
}

ScalarField field_from_json(const json& envelope) {
  auto domain = domain_from_json(envelope.at("domain"));
  const auto values = envelope.at("values").get<std::vector<double>>();
  if (static_cast<Index>(values.size()) != domain->size())
    throw std::invalid_argument("field envelope has the wrong number of values");
  Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  return ScalarField(std::move(domain), std::move(v), envelope.value("dirichlet", false));
}

void write_field_csv(const ScalarField& field, std::ostream& out) {
  const Domain& d = field.domain();
  const bool two_axes = d.grid_dimension() == 2;
  const char* axis = d.kind() == DomainKind::radial_ball ? "r" : "x";
  out << axis << (two_axes ? ",y" : "") << ",value\n";
  for (Index i = 0; i < d.size(); ++i) {
    const Point c = d.coordinates(i);
    out << format_real(c.x()) << ',';
    if (two_axes) out << format_real(c.y()) << ',';
    out << format_real(field[i]) << '\n';
  }
}

ScalarField read_field_csv(DomainPtr domain, std::istream& in, bool dirichlet) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty field CSV");
  Vector v(domain->size());
  Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= v.size()) throw std::invalid_argument("field CSV has too many rows");
    const auto comma = line.rfind(',');
    v[row++] = std::stod(line.substr(comma + 1));
  }
  if (row != v.size()) throw std::invalid_argument("field CSV has too few rows");
  return ScalarField(std::move(domain), std::move(v), dirichlet);
}

}  // namespace plap
