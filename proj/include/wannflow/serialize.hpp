#pragma once

#include <json.hpp>
#include <string>

#include "wannflow/reservoir.hpp"

namespace wannflow {

// JSON (de)serialization for artifacts.  Doubles are written in shortest
// round-trip form, so save -> load reproduces every value bit for bit.

nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

nlohmann::json genome_to_json(const ReservoirGenome& genome);
ReservoirGenome genome_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ReservoirModel& model);
ReservoirModel model_from_json(const nlohmann::json& j);

void save_genome(const std::string& path, const ReservoirGenome& genome);
ReservoirGenome load_genome(const std::string& path);

void save_model(const std::string& path, const ReservoirModel& model);
ReservoirModel load_model(const std::string& path);

/// Parse a JSON document from disk, wrapping parse failures in DataError.
nlohmann::json load_json(const std::string& path);

/// Whole-file read/write; writes go to a temp file in the same directory and
/// are renamed into place, so a crash never leaves a partial artifact.
std::string read_text_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace wannflow
