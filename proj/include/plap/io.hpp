#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "plap/mesh.hpp"

namespace plap {

using json = nlohmann::json;

/// Decimal rendering with 17 significant digits (round-trips every double).
std::string format_real(double value);

/// Serializes like json::dump but emits every float with 17 significant digits.
std::string dump_json(const json& value, int indent = 2);

json domain_to_json(const Domain& domain);
DomainPtr domain_from_json(const json& envelope);

/// {domain, h, values, dirichlet}
json field_to_json(const ScalarField& field);
ScalarField field_from_json(const json& envelope);

/// One row per node: coordinates then value.
void write_field_csv(const ScalarField& field, std::ostream& out);
ScalarField read_field_csv(DomainPtr domain, std::istream& in, bool dirichlet);

}  // namespace plap
