#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "resolv/codes.hpp"
#include "resolv/distribution.hpp"
#include "resolv/errors.hpp"
#include "resolv/product.hpp"

namespace resolv {

inline constexpr const char* kModelVersion = "resolv-model/1";
inline constexpr const char* kCodeVersion = "resolv-code/1";

enum class ModelMode { kIid, kAlternating, kExplicitN };

/// Parsed model file: per-letter sources and channels for the iid and
/// alternating modes, or a single already-blocked pair for explicit-n. The
/// optional target is a per-letter output pmf (block-level for
/// explicit-n).
struct ModelFile {
    ModelMode mode = ModelMode::kIid;
    std::vector<FiniteDistribution> sources;
    std::vector<Channel> channels;
    std::optional<FiniteDistribution> target;
    std::optional<int> explicit_n;

    std::vector<ProductComponent> components() const {
        std::vector<ProductComponent> out;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            out.emplace_back(sources[i], channels[i]);
        }
        return out;
    }
};

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

inline std::vector<std::string> string_list(const nlohmann::json& j,
                                            const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) {
            throw ValidationError(what + ": labels must be strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline std::vector<double> number_list(const nlohmann::json& j,
                                       const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) {
            throw ValidationError(what + ": entries must be numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

inline FiniteDistribution parse_distribution(const nlohmann::json& j,
                                             const std::string& what) {
    if (!j.is_object() || !j.contains("labels") || !j.contains("pmf")) {
        throw ValidationError(what + ": expected {labels, pmf}");
    }
    try {
        return FiniteDistribution(string_list(j.at("labels"), what),
                                  number_list(j.at("pmf"), what));
    } catch (const ValidationError& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

inline Channel parse_channel(const nlohmann::json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("input_labels") ||
        !j.contains("output_labels") || !j.contains("matrix")) {
        throw ValidationError(
            what + ": expected {input_labels, output_labels, matrix}");
    }
    const auto in = string_list(j.at("input_labels"), what);
    const auto out = string_list(j.at("output_labels"), what);
    const auto& m = j.at("matrix");
    if (!m.is_array() || m.size() != in.size()) {
        throw ValidationError(what + ": matrix must have one row per input");
    }
    std::vector<double> flat;
    flat.reserve(in.size() * out.size());
    for (std::size_t r = 0; r < m.size(); ++r) {
        const auto row =
            number_list(m.at(r), what + " row " + std::to_string(r));
        if (row.size() != out.size()) {
            throw ValidationError(what + " row " + std::to_string(r) +
                                  ": expected " + std::to_string(out.size()) +
                                  " entries");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    try {
        return Channel(in, out, std::move(flat));
    } catch (const ValidationError& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

}  // namespace detail

inline ModelFile parse_model_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("model: expected a JSON object");
    if (!j.contains("version") || !j.at("version").is_string() ||
        j.at("version").get<std::string>() != kModelVersion) {
        throw ValidationError(std::string("model: unrecognized version tag; "
                                          "expected \"") +
                              kModelVersion + "\"");
    }
    if (!j.contains("mode") || !j.at("mode").is_string()) {
        throw ValidationError("model: missing mode");
    }
    ModelFile model;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "iid") {
        model.mode = ModelMode::kIid;
    } else if (mode == "alternating") {
        model.mode = ModelMode::kAlternating;
    } else if (mode == "explicit-n") {
        model.mode = ModelMode::kExplicitN;
    } else {
        throw ValidationError("model: mode must be iid, alternating, or "
                              "explicit-n; got '" +
                              mode + "'");
    }
    if (!j.contains("sources") || !j.at("sources").is_array() ||
        !j.contains("channels") || !j.at("channels").is_array()) {
        throw ValidationError("model: missing sources/channels arrays");
    }
    for (std::size_t i = 0; i < j.at("sources").size(); ++i) {
        model.sources.push_back(detail::parse_distribution(
            j.at("sources").at(i), "source[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < j.at("channels").size(); ++i) {
        model.channels.push_back(detail::parse_channel(
            j.at("channels").at(i), "channel[" + std::to_string(i) + "]"));
    }
    const std::size_t want =
        model.mode == ModelMode::kAlternating ? 2 : 1;
    if (model.sources.size() != want || model.channels.size() != want) {
        throw ValidationError("model: mode '" + mode + "' needs exactly " +
                              std::to_string(want) +
                              " source/channel pair(s)");
    }
    if (j.contains("target")) {
        model.target = detail::parse_distribution(j.at("target"), "target");
        if (model.target->labels() != model.channels[0].out_labels()) {
            throw ValidationError(
                "target: alphabet must match the channel output alphabet");
        }
    }
    if (model.mode == ModelMode::kExplicitN) {
        if (!j.contains("n") || !j.at("n").is_number_integer() ||
            j.at("n").get<int>() < 1) {
            throw ValidationError("model: explicit-n mode needs integer n >= 1");
        }
        model.explicit_n = j.at("n").get<int>();
    }
    // Pair validation (source alphabet vs channel input).
    model.components();
    return model;
}

inline ModelFile parse_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("model: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(
            "model: JSON parse error at line " +
            std::to_string(detail::line_of_byte(text, e.byte)) + ": " +
            e.what());
    }
    return parse_model_json(j);
}

inline nlohmann::json code_to_json(const ResolvabilityCode& code) {
    nlohmann::json j;
    j["version"] = kCodeVersion;
    j["n"] = code.n;
    j["M"] = code.size();
    j["codewords"] = code.codewords;
    if (code.seed) {
        j["seed"] = *code.seed;
    }
    return j;
}

inline ResolvabilityCode code_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("version") ||
        j.at("version").get<std::string>() != kCodeVersion) {
        throw ValidationError(std::string("code: unrecognized version tag; "
                                          "expected \"") +
                              kCodeVersion + "\"");
    }
    ResolvabilityCode code;
    if (!j.contains("n") || !j.at("n").is_number_integer()) {
        throw ValidationError("code: missing blocklength n");
    }
    code.n = j.at("n").get<int>();
    code.codewords = detail::string_list(j.at("codewords"), "codewords");
    if (code.codewords.empty()) {
        throw ValidationError("code: empty codeword list");
    }
    if (j.contains("M") &&
        j.at("M").get<std::uint64_t>() != code.codewords.size()) {
        throw ValidationError("code: M does not match the codeword count");
    }
    if (j.contains("seed")) {
        code.seed = j.at("seed").get<std::uint64_t>();
    }
    return code;
}

inline void write_code_file(const ResolvabilityCode& code,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("code: cannot write '" + path + "'");
    out << code_to_json(code).dump(2) << "\n";
}

inline ResolvabilityCode read_code_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("code: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("code: JSON parse error: " +
                              std::string(e.what()));
    }
    return code_from_json(j);
}

/// Fixed-format CSV: 12 significant digits for floating values, RFC-style
/// quoting only when a cell needs it. Byte-identical output for identical
/// inputs is part of the contract.
class CsvWriter {
public:
    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return buf;
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ += ',';
            out_ += quoted(cells[i]);
        }
        out_ += '\n';
    }

    const std::string& str() const { return out_; }

private:
    static std::string quoted(const std::string& cell) {
        if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
        std::string q = "\"";
        for (char c : cell) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }

    std::string out_;
};

}  // namespace resolv
