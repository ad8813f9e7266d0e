#include "saricos/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "saricos/errors.hpp"

namespace saricos {

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw validation_error("ragged matrix in checkpoint");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json bound_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double bound_from_json(const json& j, double inf) { return j.is_null() ? inf : j.get<double>(); }

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json j;
  j["schema_version"] = kCheckpointSchemaVersion;
  j["format"] = "saricos-policy";
  j["mode"] = ckpt.mode;
  j["num_skills"] = ckpt.params.num_skills();
  j["alpha"] = matrix_to_json(ckpt.params.alpha);
  j["omega"] = matrix_to_json(ckpt.params.omega);
  j["variance"] = ckpt.params.variance;
  j["rap_clamp"] = {bound_to_json(ckpt.params.clamp.lo), bound_to_json(ckpt.params.clamp.hi)};

  json features;
  features["kind"] = to_string(ckpt.inter_spec.kind);
  features["order"] = ckpt.inter_spec.order;
  features["coupled"] = ckpt.inter_spec.coupled;
  json bounds = json::array();
  for (const auto& b : ckpt.inter_spec.bounds) bounds.push_back({b.lo, b.hi});
  features["bounds"] = std::move(bounds);
  features["rad"] = ckpt.rad_kind;
  j["features"] = std::move(features);

  j["seed_lineage"] = ckpt.seed_lineage;
  json meta = json::object();
  for (const auto& [k, v] : ckpt.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  try {
    const json j = json::parse(text);
    const int version = j.at("schema_version").get<int>();
    if (version != kCheckpointSchemaVersion) {
      throw validation_error("unsupported checkpoint schema_version " + std::to_string(version));
    }
    Checkpoint c;
    c.mode = j.at("mode").get<std::string>();
    c.params.alpha = matrix_from_json(j.at("alpha"));
    c.params.omega = matrix_from_json(j.at("omega"));
    c.params.variance = j.at("variance").get<double>();
    const double inf = std::numeric_limits<double>::infinity();
    c.params.clamp.lo = bound_from_json(j.at("rap_clamp").at(0), -inf);
    c.params.clamp.hi = bound_from_json(j.at("rap_clamp").at(1), inf);

    const auto& f = j.at("features");
    c.inter_spec.kind = feature_kind_from_string(f.at("kind").get<std::string>());
    c.inter_spec.order = f.at("order").get<int>();
    c.inter_spec.coupled = f.at("coupled").get<bool>();
    for (const auto& b : f.at("bounds")) c.inter_spec.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    c.rad_kind = f.at("rad").get<std::string>();

    c.seed_lineage = j.at("seed_lineage").get<std::vector<std::uint64_t>>();
    for (const auto& [k, v] : j.at("metadata").items()) c.metadata[k] = v.get<std::string>();

    if (static_cast<std::size_t>(c.params.alpha.rows()) != j.at("num_skills").get<std::size_t>()) {
      throw validation_error("num_skills does not match alpha");
    }
    c.params.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(ckpt);
  if (!out) throw io_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace saricos
