#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tacsole/errors.hpp"
#include "tacsole/version.hpp"

namespace tacsole {

// Every CLI run writes a manifest next to its outputs: the subcommand,
// the effective configuration (defaults included) and the seed, so any
// output file can be regenerated from the manifest alone. No wall-clock
// fields; reruns must be byte-identical.
inline void write_manifest(const std::string& path, const std::string& subcommand,
                           nlohmann::json config)
{
    nlohmann::json doc;
    doc["tool"] = "tacsole";
    doc["version"] = kVersion;
    doc["subcommand"] = subcommand;
    doc["config"] = std::move(config);
    std::ofstream out(path);
    if (!out) throw io_error("manifest: cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace tacsole
