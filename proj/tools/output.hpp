#pragma once

#include "stablewalk/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace stablewalk::cli {

std::string sha256_hex(const std::string& bytes);

// Writes through a temporary sibling and renames it into place.
void write_atomically(const std::string& path, const std::string& bytes);

// Collects the files a run produces and writes <out>.manifest.json beside the main output.
class RunRecord {
public:
    RunRecord(std::string command, nlohmann::json parameters, const QuadratureSpec& spec);

    // Process-wide invocation details recorded in every manifest.
    static void set_invocation(std::vector<std::string> argv);

    // Body goes to `path` when given, else to stdout.
    void emit(const std::optional<std::string>& path, const std::string& body);
    void finish(const std::optional<std::string>& main_output) const;

private:
    std::string command_;
    nlohmann::json parameters_;
    QuadratureSpec spec_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::pair<std::string, std::string>> outputs_; // path, digest
};

} // namespace stablewalk::cli
