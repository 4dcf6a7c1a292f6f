#pragma once

// JSON instance formats and report serialization. "inf"/"-inf" strings are
// accepted (and emitted) as extended-real sentinels.

#include <iosfwd>
#include <json.hpp>

#include "kantor/ergodic.hpp"
#include "kantor/gallery.hpp"
#include "kantor/inequalities.hpp"
#include "kantor/stochastic.hpp"

namespace kantor {

using json = nlohmann::json;

double number_from_json(const json& j);
json number_to_json(double v);

Mat mat_from_json(const json& j);
json mat_to_json(const Mat& m);

FiniteSpace space_from_json(const json& j);
json space_to_json(const FiniteSpace& s);

Measure measure_from_json(const json& j, const FiniteSpace& space);
json measure_to_json(const Measure& m);

Potential potential_from_json(const json& j, const FiniteSpace& space);
json potential_to_json(const Potential& p);

// transfers embed their ground space(s)
Transfer transfer_from_json(const json& j);
json transfer_to_json(const Transfer& t);

ControlledChain chain_from_json(const json& j);

InequalitySpec inequality_from_json(const json& j);

json ergodic_summary_to_json(const ErgodicSummary& s);
json coupling_to_json(const Coupling& c);

// CSV matrix emitter, 17 significant digits
void write_matrix_csv(std::ostream& os, const Mat& m);

json load_json_file(const std::string& path);

}  // namespace kantor
