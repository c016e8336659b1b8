#include "fracprox/serialize.hpp"

#include "fracprox/error.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fracprox {

Json matrix_to_json(const Matrix& M) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(M.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) data.push_back(M(i, j));
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", data}};
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw Error(ErrorCode::InvalidShape, "matrix data does not match rows x cols");
  }
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  return M;
}

Json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from_json(const Json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

namespace {

Json set_to_json(const FeasibleSet& s) {
  Json j{{"kind", to_string(s.kind())}};
  switch (s.kind()) {
    case FeasibleSet::Kind::Box:
      j["lo"] = vector_to_json(s.lower());
      j["hi"] = vector_to_json(s.upper());
      break;
    case FeasibleSet::Kind::Sparsity:
    case FeasibleSet::Kind::SphereSparsity: j["r"] = s.sparsity_level(); break;
    default: break;
  }
  return j;
}

Json coupling_params(const InstanceSpec& spec) {
  switch (spec.kind) {
    case InstanceSpec::Kind::Ep: return {{"kind", "ep_product"}, {"m", spec.m}};
    case InstanceSpec::Kind::Gep: return {{"kind", "l0_penalty"}, {"lambda", spec.lambda}};
    case InstanceSpec::Kind::Fqp:
      return {{"kind", "quadratic"}, {"A0", matrix_to_json(spec.A0)}, {"a0", vector_to_json(spec.a0)}};
    case InstanceSpec::Kind::Geps: return {{"kind", "zero"}};
  }
  return {{"kind", "zero"}};
}

}  // namespace

Json problem_to_json(const FractionalProblem& problem) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    blocks.push_back({{"dim", problem.set(i).dim()},
                      {"set", set_to_json(problem.set(i))},
                      {"alpha", problem.term(i).alpha},
                      {"beta", problem.term(i).beta}});
  }
  return {{"m", problem.num_blocks()},
          {"blocks", blocks},
          {"coupling", {{"kind", problem.coupling().kind}}}};
}

Json instance_to_json(const InstanceSpec& spec) {
  Json doc = problem_to_json(build(spec));
  doc["coupling"] = coupling_params(spec);

  Json inst{{"kind", to_string(spec.kind)}};
  switch (spec.kind) {
    case InstanceSpec::Kind::Ep:
      inst["m"] = spec.m;
      inst["gamma"] = spec.gamma;
      break;
    case InstanceSpec::Kind::Fqp: {
      Json as = Json::array(), bs = Json::array();
      for (const auto& A : spec.A_list) as.push_back(matrix_to_json(A));
      for (const auto& B : spec.B_list) bs.push_back(matrix_to_json(B));
      inst["A0"] = matrix_to_json(spec.A0);
      inst["a0"] = vector_to_json(spec.a0);
      inst["A_list"] = as;
      inst["B_list"] = bs;
      break;
    }
    case InstanceSpec::Kind::Gep:
    case InstanceSpec::Kind::Geps:
      inst["A"] = matrix_to_json(spec.A);
      inst["B"] = matrix_to_json(spec.B);
      if (spec.kind == InstanceSpec::Kind::Gep) {
        inst["lambda"] = spec.lambda;
      } else {
        inst["r"] = spec.r;
      }
      break;
  }
  doc["instance"] = inst;
  return doc;
}

InstanceSpec instance_from_json(const Json& j) {
  if (!j.contains("instance")) {
    throw Error(ErrorCode::InvalidParam, "document has no 'instance' record");
  }
  const Json& inst = j.at("instance");
  InstanceSpec spec;
  try {
    spec.kind = instance_kind_from_string(inst.at("kind").get<std::string>());
    switch (spec.kind) {
      case InstanceSpec::Kind::Ep:
        spec.m = inst.at("m").get<std::size_t>();
        spec.gamma = inst.at("gamma").get<double>();
        break;
      case InstanceSpec::Kind::Fqp:
        spec.A0 = matrix_from_json(inst.at("A0"));
        spec.a0 = vector_from_json(inst.at("a0"));
        for (const auto& A : inst.at("A_list")) spec.A_list.push_back(matrix_from_json(A));
        for (const auto& B : inst.at("B_list")) spec.B_list.push_back(matrix_from_json(B));
        break;
      case InstanceSpec::Kind::Gep:
      case InstanceSpec::Kind::Geps:
        spec.A = matrix_from_json(inst.at("A"));
        spec.B = matrix_from_json(inst.at("B"));
        if (spec.kind == InstanceSpec::Kind::Gep) {
          spec.lambda = inst.at("lambda").get<double>();
        } else {
          spec.r = inst.at("r").get<std::size_t>();
        }
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParam, std::string("malformed instance: ") + e.what());
  }
  if (j.contains("m") && j.at("m").get<std::size_t>() != build(spec).num_blocks()) {
    throw Error(ErrorCode::DimensionMismatch, "block count disagrees with instance record");
  }
  return spec;
}

void write_matrix_csv(std::ostream& out, const Matrix& M) {
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << M(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::InvalidShape, "ragged matrix rows");
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M;
}

}  // namespace fracprox
