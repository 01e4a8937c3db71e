// Copyright 2026 The bayermc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayermc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace bayermc {

namespace {

void check_keys(const toml::table& table, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : table) {
        if (!allowed.count(std::string(key.str()))) {
            throw ConfigError("config: unknown key '" + std::string(key.str()) + "' in " + where);
        }
    }
}

const toml::table* section(const toml::table& root, const char* name) {
    const toml::node* node = root.get(name);
    if (!node) return nullptr;
    if (!node->is_table()) throw ConfigError(std::string("config: '") + name + "' must be a table");
    return node->as_table();
}

double get_double(const toml::table& t, const char* key, double fallback) {
    const toml::node* node = t.get(key);
    if (!node) return fallback;
    if (auto v = node->value<double>()) return *v;
    throw ConfigError(std::string("config: '") + key + "' must be a number");
}

std::optional<std::int64_t> get_int(const toml::table& t, const char* key) {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_integer()) throw ConfigError(std::string("config: '") + key + "' must be an integer");
    return node->value<std::int64_t>();
}

std::optional<std::string> get_string(const toml::table& t, const char* key) {
    const toml::node* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) throw ConfigError(std::string("config: '") + key + "' must be a string");
    return node->value<std::string>();
}

void apply_stage(const toml::table& fme, const char* name, SearchStage& stage) {
    const toml::table* t = section(fme, name);
    if (!t) return;
    check_keys(*t, std::string("[fme.") + name + "]", {"range", "step"});
    if (auto v = get_int(*t, "range")) stage.range = static_cast<int>(*v);
    if (auto v = get_int(*t, "step")) stage.step = static_cast<int>(*v);
}

} // namespace

void PipelineConfig::validate() const {
    fme.validate();
    if (deviation_threshold < 0) throw ConfigError("refine: deviation_threshold must be >= 0");
    if (!(select.aem_threshold >= 0.0)) throw ConfigError("select: aem_threshold must be >= 0");
    if (select.max_gop && *select.max_gop < 1) throw ConfigError("select: max_gop must be >= 1");
    if (backbone_gflops < 0.0) throw ConfigError("metrics: backbone_gflops must be >= 0");
    if (num_classes && (*num_classes < 1 || *num_classes > 256)) {
        throw ConfigError("metrics: num_classes must lie in [1, 256]");
    }
}

PipelineConfig default_pipeline_config(const std::string& preset) {
    PipelineConfig c;
    c.preset = preset;
    c.fme = fme_preset(preset);
    return c;
}

PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::optional<std::string>& preset_override) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(msg.str());
    }
    check_keys(root, "the top level", {"preset", "frames", "fme", "refine", "select", "metrics"});

    std::string preset = get_string(root, "preset").value_or("standard");
    if (preset_override) preset = *preset_override;
    PipelineConfig c = default_pipeline_config(preset);

    if (const auto* t = section(root, "frames")) {
        check_keys(*t, "[frames]", {"pattern"});
        if (auto v = get_string(*t, "pattern")) c.pattern = parse_frame_kind(*v);
    }
    if (const auto* t = section(root, "fme")) {
        check_keys(*t, "[fme]",
                   {"lambda", "block_sizes", "split_threshold", "sparsity_tolerance", "refine_block_threshold",
                    "coarse", "intermediate", "fine"});
        c.fme.lambda = get_double(*t, "lambda", c.fme.lambda);
        c.fme.split_threshold = get_double(*t, "split_threshold", c.fme.split_threshold);
        c.fme.sparsity_tolerance = get_double(*t, "sparsity_tolerance", c.fme.sparsity_tolerance);
        c.fme.refine_block_threshold = get_double(*t, "refine_block_threshold", c.fme.refine_block_threshold);
        if (const toml::node* n = t->get("block_sizes")) {
            const toml::array* arr = n->as_array();
            if (!arr) throw ConfigError("config: 'block_sizes' must be an array of integers");
            c.fme.block_sizes.clear();
            for (const auto& e : *arr) {
                if (!e.is_integer()) throw ConfigError("config: 'block_sizes' must be an array of integers");
                c.fme.block_sizes.push_back(static_cast<int>(*e.value<std::int64_t>()));
            }
        }
        apply_stage(*t, "coarse", c.fme.stages[0]);
        apply_stage(*t, "intermediate", c.fme.stages[1]);
        apply_stage(*t, "fine", c.fme.stages[2]);
    }
    if (const auto* t = section(root, "refine")) {
        check_keys(*t, "[refine]", {"deviation_threshold"});
        if (auto v = get_int(*t, "deviation_threshold")) c.deviation_threshold = static_cast<int>(*v);
    }
    if (const auto* t = section(root, "select")) {
        check_keys(*t, "[select]", {"aem_threshold", "max_gop", "statistic", "reference"});
        c.select.aem_threshold = get_double(*t, "aem_threshold", c.select.aem_threshold);
        if (auto v = get_int(*t, "max_gop")) {
            c.select.max_gop = *v > 0 ? std::optional<int>(static_cast<int>(*v)) : std::nullopt;
        }
        if (auto v = get_string(*t, "statistic")) c.select.statistic = parse_aem_statistic(*v);
        if (auto v = get_string(*t, "reference")) c.select.reference = parse_reference_policy(*v);
    }
    if (const auto* t = section(root, "metrics")) {
        check_keys(*t, "[metrics]", {"backbone_gflops", "num_classes", "ignore_class"});
        c.backbone_gflops = get_double(*t, "backbone_gflops", c.backbone_gflops);
        if (auto v = get_int(*t, "num_classes")) {
            c.num_classes = *v > 0 ? std::optional<int>(static_cast<int>(*v)) : std::nullopt;
        }
        if (auto v = get_int(*t, "ignore_class")) {
            c.ignore_class = *v >= 0 ? std::optional<int>(static_cast<int>(*v)) : std::nullopt;
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    const std::optional<std::string>& preset_override) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_pipeline_config(buffer.str(), preset_override);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace bayermc
