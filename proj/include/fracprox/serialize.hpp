#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/instances.hpp"
#include "fracprox/problem.hpp"

#include <json.hpp>

#include <iosfwd>

namespace fracprox {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [row-major entries]}
Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Structural description {m, blocks: [{dim, set, alpha, beta}], coupling}.
Json problem_to_json(const FractionalProblem& problem);

/// Structural description plus an "instance" record with every parameter
/// needed to rebuild the problem.
Json instance_to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const Json& j);

/// Dense matrix as CSV, one matrix row per line, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Matrix& M);
Matrix read_matrix_csv(std::istream& in);

}  // namespace fracprox
