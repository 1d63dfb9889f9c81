#pragma once

#include <string>

#include <json.hpp>

#include "mesmix/network.hpp"

namespace mesmix {

inline constexpr int kSchemaVersion = 1;

/// Instance document. Infinite bounds and ramps are written as null.
nlohmann::json instance_to_json(const NetworkGraph& g);

/// Throws InvalidInstance naming the offending JSON path. Referential checks
/// are left to validate_instance.
NetworkGraph instance_from_json(const nlohmann::json& doc);

nlohmann::json node_to_json(const Node& n);
nlohmann::json arc_to_json(const Arc& a);

NetworkGraph load_instance(const std::string& path);
void save_instance(const NetworkGraph& g, const std::string& path);

/// Two-space indented text with a trailing newline.
std::string dump_json(const nlohmann::json& doc);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace mesmix
