#include "sentistack/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "sentistack/errors.hpp"

namespace sentistack {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'T', 'K', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ofstream& out, std::uint64_t v) {
    std::uint8_t bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = std::uint8_t(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    std::uint8_t bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = std::uint8_t(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
    // Little-endian host assumed; doubles are written verbatim.
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 8));
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
    return {{"seed", cfg.seed},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"weight_decay", cfg.weight_decay},
            {"beta1", cfg.beta1},
            {"beta2", cfg.beta2},
            {"eps_adam", cfg.eps_adam},
            {"max_len", cfg.max_len},
            {"hidden", cfg.hidden},
            {"hidden_fc", cfg.hidden_fc},
            {"maps_per_bank", cfg.maps_per_bank},
            {"fine_tune_embeddings", cfg.fine_tune_embeddings}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.weight_decay = j.at("weight_decay").get<double>();
    cfg.beta1 = j.at("beta1").get<double>();
    cfg.beta2 = j.at("beta2").get<double>();
    cfg.eps_adam = j.at("eps_adam").get<double>();
    cfg.max_len = j.at("max_len").get<std::size_t>();
    cfg.hidden = j.at("hidden").get<std::size_t>();
    cfg.hidden_fc = j.at("hidden_fc").get<std::size_t>();
    cfg.maps_per_bank = j.at("maps_per_bank").get<std::size_t>();
    cfg.fine_tune_embeddings = j.at("fine_tune_embeddings").get<bool>();
    return cfg;
}

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) {
            throw IoError("cannot open checkpoint: " + path.string());
        }
    }

    std::uint64_t offset() const { return offset_; }

    void read_bytes(void* dst, std::size_t n, const char* field) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw FormatError(path_.string() + ": truncated while reading " + field +
                              " at offset " + std::to_string(offset_));
        }
        offset_ += n;
    }

    std::uint64_t read_u64(const char* field) {
        std::uint8_t bytes[8];
        read_bytes(bytes, 8, field);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
        return v;
    }

    std::uint32_t read_u32(const char* field) {
        std::uint8_t bytes[4];
        read_bytes(bytes, 4, field);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
        return v;
    }

    std::string read_string(const char* field) {
        const std::uint64_t len = read_u64(field);
        if (len > (1ULL << 32)) {
            throw FormatError(path_.string() + ": implausible length for " + field +
                              " at offset " + std::to_string(offset_ - 8));
        }
        std::string s(len, '\0');
        if (len > 0) read_bytes(s.data(), len, field);
        return s;
    }

    bool at_eof() {
        in_.peek();
        return in_.eof();
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::uint64_t offset_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& model) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write checkpoint: " + path.string());
    }
    nlohmann::json meta = {{"kind", model_kind_name(model.kind)},
                           {"embed_dim", model.embed_dim},
                           {"vocab_size", model.embeddings.rows()},
                           {"vocab_hash", model.vocab_hash},
                           {"config", config_to_json(model.cfg)}};
    const std::string meta_str = meta.dump();

    out.write(kMagic, 8);
    write_u32(out, kVersion);
    write_u64(out, meta_str.size());
    out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

    ConstParamRefs refs = model.net_params();
    write_u64(out, refs.size() + 1);  // + embeddings
    auto write_array = [&out](const std::string& name, const Matrix& m) {
        write_u64(out, name.size());
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u64(out, m.rows());
        write_u64(out, m.cols());
        write_doubles(out, m.data(), m.size());
    };
    for (const auto& [name, m] : refs) write_array(name, *m);
    write_array("embeddings", model.embeddings);
    if (!out) {
        throw IoError("failed writing checkpoint: " + path.string());
    }
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);

    char magic[8];
    r.read_bytes(magic, 8, "magic");
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw FormatError(path.string() + ": bad magic at offset 0");
    }
    const std::uint32_t version = r.read_u32("version");
    if (version != kVersion) {
        throw FormatError(path.string() + ": unsupported version " +
                          std::to_string(version));
    }
    const std::string meta_str = r.read_string("metadata");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_str);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": metadata is not valid JSON: " + e.what());
    }

    ModelParams model;
    std::size_t vocab_size = 0;
    try {
        model.kind = parse_model_kind(meta.at("kind").get<std::string>());
        model.embed_dim = meta.at("embed_dim").get<std::size_t>();
        model.vocab_hash = meta.at("vocab_hash").get<std::string>();
        model.cfg = config_from_json(meta.at("config"));
        vocab_size = meta.at("vocab_size").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": metadata field missing or mistyped: " +
                          e.what());
    }
    if (model.kind == ModelKind::lstm) {
        model.lstm = BiLstmClassifier::zeros(model.embed_dim, model.cfg.hidden);
    } else {
        model.cnn = CnnParams::zeros(model.embed_dim, model.cfg.maps_per_bank,
                                     model.cfg.hidden_fc);
    }
    model.embeddings = Matrix(vocab_size, model.embed_dim);

    ParamRefs refs = model.net_params();
    refs.emplace_back("embeddings", &model.embeddings);

    const std::uint64_t n_arrays = r.read_u64("array count");
    if (n_arrays != refs.size()) {
        throw FormatError(path.string() + ": holds " + std::to_string(n_arrays) +
                          " arrays, model needs " + std::to_string(refs.size()));
    }
    for (auto& [expected_name, m] : refs) {
        const std::string name = r.read_string("array name");
        if (name != expected_name) {
            throw FormatError(path.string() + ": array \"" + name + "\" where \"" +
                              expected_name + "\" was expected at offset " +
                              std::to_string(r.offset()));
        }
        const std::uint64_t rows = r.read_u64("rows");
        const std::uint64_t cols = r.read_u64("cols");
        if (rows != m->rows() || cols != m->cols()) {
            throw FormatError(path.string() + ": array \"" + name + "\" is " +
                              std::to_string(rows) + "x" + std::to_string(cols) +
                              ", expected " + m->shape_str());
        }
        r.read_bytes(m->data(), m->size() * 8, name.c_str());
        ensure_finite(*m, ("checkpoint array " + name).c_str());
    }
    if (!r.at_eof()) {
        throw FormatError(path.string() + ": trailing bytes after offset " +
                          std::to_string(r.offset()));
    }
    return model;
}

}  // namespace sentistack
