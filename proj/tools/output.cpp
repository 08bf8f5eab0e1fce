#include "output.hpp"

#include "stablewalk/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace stablewalk::cli {

namespace {
constexpr const char* tool_version = "0.1.0";

std::vector<std::string>& invocation()
{
    static std::vector<std::string> argv;
    return argv;
}

const std::chrono::steady_clock::time_point process_start = std::chrono::steady_clock::now();
} // namespace

void RunRecord::set_invocation(std::vector<std::string> argv) { invocation() = std::move(argv); }

std::string sha256_hex(const std::string& bytes)
{
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
        throw std::runtime_error("sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

void write_atomically(const std::string& path, const std::string& bytes)
{
    const std::filesystem::path target(path);
    std::filesystem::path temp = target;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot open " + temp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw InputError("write to " + temp.string() + " failed");
    }
    std::filesystem::rename(temp, target);
}

RunRecord::RunRecord(std::string command, nlohmann::json parameters, const QuadratureSpec& spec)
    : command_(std::move(command)), parameters_(std::move(parameters)), spec_(spec),
      start_(process_start)
{
}

void RunRecord::emit(const std::optional<std::string>& path, const std::string& body)
{
    if (!path) {
        std::cout << body;
        if (!body.empty() && body.back() != '\n')
            std::cout << '\n';
        return;
    }
    write_atomically(*path, body);
    outputs_.emplace_back(*path, sha256_hex(body));
}

void RunRecord::finish(const std::optional<std::string>& main_output) const
{
    if (!main_output)
        return;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [path, digest] : outputs_)
        files.push_back({{"path", path}, {"sha256", digest}});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const nlohmann::json manifest = {
        {"command", command_},
        {"argv", invocation()},
        {"parameters", parameters_},
        {"tool_version", tool_version},
        {"quadrature", {{"abs_tol", spec_.abs_tol}, {"rel_tol", spec_.rel_tol}, {"max_panels", spec_.max_panels}}},
        {"wall_clock_seconds", seconds},
        {"outputs", files},
    };
    write_atomically(*main_output + ".manifest.json", manifest.dump(2) + "\n");
}

} // namespace stablewalk::cli
