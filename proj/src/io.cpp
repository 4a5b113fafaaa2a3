#include "dra/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dra/errors.hpp"

namespace dra {
namespace {

using nlohmann::json;

std::string quote(const std::string& s) { return json(s).dump(); }

double need_number(const json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError(key + ": expected a number");
    return value.get<double>();
}

long long need_integer(const json& value, const std::string& key) {
    if (!value.is_number_integer()) throw ConfigError(key + ": expected an integer");
    return value.get<long long>();
}

std::uint64_t need_u64(const json& value, const std::string& key) {
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    if (value.is_number_integer() && value.get<long long>() >= 0) {
        return static_cast<std::uint64_t>(value.get<long long>());
    }
    throw ConfigError(key + ": expected a nonnegative integer");
}

std::string need_string(const json& value, const std::string& key) {
    if (!value.is_string()) throw ConfigError(key + ": expected a string");
    return value.get<std::string>();
}

int need_int_at_least(const json& value, const std::string& key, int minimum) {
    const long long raw = need_integer(value, key);
    if (raw < minimum) {
        throw ConfigError(key + ": must be >= " + std::to_string(minimum));
    }
    if (raw > std::numeric_limits<int>::max()) throw ConfigError(key + ": too large");
    return static_cast<int>(raw);
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp + " for writing");
        out << content;
        if (!out.good()) throw Error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("cannot move " + tmp + " into place at " + path);
    }
}

std::vector<CompletionGroup> ingest_completions(const std::string& path, bool validate) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<CompletionGroup> groups;
    std::map<std::string, std::size_t> group_index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no);
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!record.is_object()) throw ParseError(where + ": expected a JSON object");
        if (!record.contains("prompt_id") || !record["prompt_id"].is_string()) {
            throw ParseError(where + ": prompt_id must be a string");
        }
        if (!record.contains("completion_id") || !record["completion_id"].is_string()) {
            throw ParseError(where + ": completion_id must be a string");
        }
        if (!record.contains("reward") || !record["reward"].is_number()) {
            throw ParseError(where + ": reward must be a number");
        }
        if (!record.contains("embedding") || !record["embedding"].is_array()) {
            throw ParseError(where + ": embedding must be an array");
        }
        const std::string prompt_id = record["prompt_id"].get<std::string>();
        std::vector<double> embedding;
        embedding.reserve(record["embedding"].size());
        for (const auto& entry : record["embedding"]) {
            if (!entry.is_number()) {
                throw ParseError(where + ": embedding entries must be numbers");
            }
            embedding.push_back(entry.get<double>());
        }

        auto [it, fresh] = group_index.try_emplace(prompt_id, groups.size());
        if (fresh) {
            groups.emplace_back();
            groups.back().prompt_id = prompt_id;
        }
        CompletionGroup& group = groups[it->second];
        group.completion_ids.push_back(record["completion_id"].get<std::string>());
        group.rewards.push_back(record["reward"].get<double>());
        group.embeddings.push_back(Embedding{std::move(embedding)});
        if (record.contains("text")) {
            if (!record["text"].is_string()) {
                throw ParseError(where + ": text must be a string");
            }
            group.texts.push_back(record["text"].get<std::string>());
        }
    }

    if (!validate) return groups;

    for (CompletionGroup& group : groups) {
        for (const Embedding& e : group.embeddings) {
            if (e.dim() == 0) {
                throw ValidationError("prompt '" + group.prompt_id + "': empty embedding");
            }
        }
        const std::size_t dim = group.embeddings.front().dim();
        for (const Embedding& e : group.embeddings) {
            if (e.dim() != dim) {
                throw MixedDimension("prompt '" + group.prompt_id +
                                     "': embedding dimensions " + std::to_string(dim) + " and " +
                                     std::to_string(e.dim()) + " in one group");
            }
        }
        try {
            group = validate_group(group);
        } catch (const Error& e) {
            throw ValidationError("prompt '" + group.prompt_id + "': " + e.what());
        }
    }
    return groups;
}

std::string completion_line(const CompletionGroup& group, std::size_t index,
                            const double* weight, const double* adjusted_reward) {
    std::string out = "{\"prompt_id\": " + quote(group.prompt_id) +
                      ", \"completion_id\": " + quote(group.completion_ids[index]) +
                      ", \"reward\": " + format_double(group.rewards[index]) +
                      ", \"embedding\": [";
    const Embedding& embedding = group.embeddings[index];
    for (std::size_t k = 0; k < embedding.values.size(); ++k) {
        if (k > 0) out += ", ";
        out += format_double(embedding.values[k]);
    }
    out += "]";
    if (!group.texts.empty()) out += ", \"text\": " + quote(group.texts[index]);
    if (weight != nullptr) out += ", \"weight\": " + format_double(*weight);
    if (adjusted_reward != nullptr) {
        out += ", \"adjusted_reward\": " + format_double(*adjusted_reward);
    }
    out += "}";
    return out;
}

std::string completion_jsonl(const std::vector<CompletionGroup>& groups) {
    std::string out;
    for (const CompletionGroup& group : groups) {
        for (std::size_t i = 0; i < group.size(); ++i) {
            out += completion_line(group, i, nullptr, nullptr);
            out += '\n';
        }
    }
    return out;
}

void write_completions(const std::string& path, const std::vector<CompletionGroup>& groups) {
    write_text_atomic(path, completion_jsonl(groups));
}

std::string metrics_csv(const std::vector<RunMetrics>& metrics, Algorithm algorithm,
                        std::uint64_t seed) {
    const std::size_t m_count = metrics.empty() ? 0 : metrics.front().visits.size();
    std::string out = "step,algorithm,seed,mode_recall,mode_entropy,mean_reward";
    for (std::size_t m = 0; m < m_count; ++m) out += ",visits_" + std::to_string(m);
    out += '\n';
    const std::string name = algorithm_name(algorithm);
    for (const RunMetrics& row : metrics) {
        out += std::to_string(row.step) + ',' + name + ',' + std::to_string(seed) + ',' +
               std::to_string(row.mode_recall) + ',' + format_double(row.mode_entropy) + ',' +
               format_double(row.mean_reward);
        for (int v : row.visits) out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

std::string analysis_records_csv(const std::vector<AnalysisRecord>& records) {
    std::string out = "prompt_id,n_completions,rho,p_value,degenerate\n";
    for (const AnalysisRecord& r : records) {
        out += r.prompt_id + ',' + std::to_string(r.n_completions) + ',' +
               format_double(r.rho) + ',' + format_double(r.p_value) + ',' +
               (r.degenerate ? "1" : "0") + '\n';
    }
    return out;
}

std::string analysis_histogram_csv(const std::vector<HistogramBin>& bins) {
    std::string out = "bin_left,bin_right,count\n";
    for (const HistogramBin& bin : bins) {
        out += format_double(bin.left) + ',' + format_double(bin.right) + ',' +
               std::to_string(bin.count) + '\n';
    }
    return out;
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig rc;
    for (const auto& [key, value] : root.items()) {
        if (key == "algorithm") {
            const std::string name = need_string(value, key);
            if (name == "grpo") rc.algorithm = Algorithm::Grpo;
            else if (name == "drgrpo") rc.algorithm = Algorithm::DrGrpo;
            else if (name == "dra_grpo") rc.algorithm = Algorithm::DraGrpo;
            else if (name == "dra_drgrpo") rc.algorithm = Algorithm::DraDrGrpo;
            else throw ConfigError("algorithm: expected grpo, drgrpo, dra_grpo, or dra_drgrpo");
        } else if (key == "smi") {
            const std::string name = need_string(value, key);
            if (name == "graphcut") rc.smi.variant = SmiVariant::GraphCut;
            else if (name == "logdet") rc.smi.variant = SmiVariant::LogDet;
            else throw ConfigError("smi: expected graphcut or logdet");
        } else if (key == "jitter") {
            rc.smi.jitter = need_number(value, key);
            if (rc.smi.jitter < 0.0 || rc.smi.jitter > 1e-3) {
                throw ConfigError("jitter: must lie in [0, 1e-3]");
            }
        } else if (key == "epsilon") {
            rc.epsilon = need_number(value, key);
            if (rc.epsilon < 0.0) throw ConfigError("epsilon: must be >= 0");
        } else if (key == "group_size") {
            rc.group_size = need_int_at_least(value, key, 2);
        } else if (key == "steps") {
            rc.steps = need_int_at_least(value, key, 0);
        } else if (key == "learning_rate") {
            rc.learning_rate = need_number(value, key);
            if (!(rc.learning_rate > 0.0)) throw ConfigError("learning_rate: must be > 0");
        } else if (key == "clip_epsilon") {
            rc.clip_epsilon = need_number(value, key);
            if (rc.clip_epsilon <= 0.0 || rc.clip_epsilon >= 1.0) {
                throw ConfigError("clip_epsilon: must lie in (0, 1)");
            }
        } else if (key == "std_floor") {
            rc.std_floor = need_number(value, key);
            if (rc.std_floor < 0.0) throw ConfigError("std_floor: must be >= 0");
        } else if (key == "seed") {
            rc.seed = need_u64(value, key);
        } else if (key == "eval_every") {
            rc.eval_every = need_int_at_least(value, key, 1);
        } else if (key == "eval_batch") {
            rc.eval_batch = need_int_at_least(value, key, 1);
        } else if (key == "dominant_prob") {
            rc.dominant_prob = need_number(value, key);
            if (rc.dominant_prob <= 0.0 || rc.dominant_prob >= 1.0) {
                throw ConfigError("dominant_prob: must lie in (0, 1)");
            }
        } else if (key == "suffix_bias") {
            rc.suffix_bias = need_number(value, key);
            if (rc.suffix_bias <= 0.0 || rc.suffix_bias >= 1.0) {
                throw ConfigError("suffix_bias: must lie in (0, 1)");
            }
        } else if (key == "vocab_size") {
            rc.vocab_size = need_int_at_least(value, key, 2);
        } else if (key == "seq_len") {
            rc.seq_len = need_int_at_least(value, key, 1);
        } else if (key == "embedding_dim") {
            rc.embedding_dim = need_int_at_least(value, key, 1);
        } else if (key == "num_modes") {
            rc.num_modes = need_int_at_least(value, key, 1);
        } else if (key == "mode_reward") {
            rc.mode_reward = need_number(value, key);
        } else if (key == "within_mode_noise") {
            rc.within_mode_noise = need_number(value, key);
            if (rc.within_mode_noise < 0.0 || rc.within_mode_noise >= 0.5) {
                throw ConfigError("within_mode_noise: must lie in [0, 0.5)");
            }
        } else if (key == "dominant_mode") {
            rc.dominant_mode = static_cast<std::size_t>(need_u64(value, key));
        } else if (key == "geometry_seed") {
            rc.geometry_seed = need_u64(value, key);
        } else if (key == "max_len") {
            rc.rewards.max_len = need_int_at_least(value, key, 1);
        } else if (key == "weight_format") {
            rc.rewards.weights["format"] = need_number(value, key);
        } else if (key == "weight_cosine") {
            rc.rewards.weights["cosine"] = need_number(value, key);
        } else if (key == "cosine_correct_min") {
            rc.rewards.cosine_correct_min = need_number(value, key);
        } else if (key == "cosine_correct_max") {
            rc.rewards.cosine_correct_max = need_number(value, key);
        } else if (key == "cosine_wrong_min") {
            rc.rewards.cosine_wrong_min = need_number(value, key);
        } else if (key == "cosine_wrong_max") {
            rc.rewards.cosine_wrong_max = need_number(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    if (rc.dominant_mode >= static_cast<std::size_t>(rc.num_modes)) {
        throw ConfigError("dominant_mode: must be < num_modes");
    }
    if (rc.num_modes > rc.vocab_size) {
        throw ConfigError("num_modes: mode first tokens exceed the vocabulary");
    }
    if (rc.embedding_dim < rc.num_modes + 2) {
        throw ConfigError("embedding_dim: must be >= num_modes + 2");
    }
    try {
        validate_reward_config(rc.rewards);
    } catch (const Error& e) {
        throw ConfigError(std::string("rewards: ") + e.what());
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

ToyEnvironment environment_from(const RunConfig& config) {
    ToyEnvironment env;
    env.vocab_size = config.vocab_size;
    env.seq_len = config.seq_len;
    env.embedding_dim = config.embedding_dim;
    env.within_mode_noise = config.within_mode_noise;
    env.dominant_mode = config.dominant_mode;
    env.geometry_seed = config.geometry_seed;
    for (int m = 0; m < config.num_modes; ++m) {
        std::vector<int> trajectory(static_cast<std::size_t>(config.seq_len), 0);
        trajectory[0] = m;
        env.modes.push_back({trajectory});
        env.mode_rewards.push_back(config.mode_reward);
        Embedding center;
        center.values.assign(static_cast<std::size_t>(config.embedding_dim), 0.0);
        center.values[static_cast<std::size_t>(m)] = 1.0;
        env.mode_centers.push_back(center);
    }
    return env;
}

TrainConfig train_config_from(const RunConfig& config) {
    TrainConfig tc;
    tc.algorithm = config.algorithm;
    tc.steps = config.steps;
    tc.group_size = config.group_size;
    tc.learning_rate = config.learning_rate;
    tc.clip_epsilon = config.clip_epsilon;
    tc.std_floor = config.std_floor;
    tc.dra_epsilon = config.epsilon;
    tc.smi = config.smi;
    tc.eval_every = config.eval_every;
    tc.eval_batch = config.eval_batch;
    tc.dominant_prob = config.dominant_prob;
    tc.suffix_bias = config.suffix_bias;
    tc.seed = config.seed;
    return tc;
}

}  // namespace dra
