#include "adacomm/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "adacomm/errors.hpp"

namespace adacomm::nn {

namespace {
constexpr int kVersion = 1;
constexpr const char* kFormat = "ctc-decoder-model";
}  // namespace

std::string checkpoint_to_json(const ModelParams& params) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["config"] = {
        {"input_dims", params.config.input_dims},
        {"filter_widths", params.config.filter_widths},
        {"filters_per_width", params.config.filters_per_width},
        {"classes", params.config.classes},
    };
    j["values"] = params.values;
    return j.dump();
}

ModelParams checkpoint_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormat) {
        throw ConfigError("checkpoint: unrecognized format");
    }
    if (j.value("version", -1) != kVersion) {
        throw ConfigError("checkpoint: unsupported version");
    }
    ModelParams p;
    try {
        const auto& c = j.at("config");
        p.config.input_dims = c.at("input_dims").get<std::size_t>();
        p.config.filter_widths = c.at("filter_widths").get<std::vector<std::size_t>>();
        p.config.filters_per_width = c.at("filters_per_width").get<std::size_t>();
        p.config.classes = c.at("classes").get<std::size_t>();
        p.values = j.at("values").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint: missing or mistyped field: ") + e.what());
    }
    p.config.validate();
    if (p.values.size() != p.config.param_count()) {
        throw ConfigError("checkpoint: value count " + std::to_string(p.values.size()) +
                          " != expected " + std::to_string(p.config.param_count()));
    }
    if (!p.all_finite()) throw ConfigError("checkpoint: non-finite parameter");
    return p;
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("checkpoint: cannot open for writing: " + path);
    out << checkpoint_to_json(params) << '\n';
    if (!out) throw ConfigError("checkpoint: write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checkpoint: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return checkpoint_from_json(text);
}

}  // namespace adacomm::nn
