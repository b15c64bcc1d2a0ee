#include "dcglab/binary_io.hpp"
#include "dcglab/trainer.hpp"

namespace dcglab {

using nlohmann::json;

std::vector<char> encode_checkpoint(const Checkpoint& c) {
    const auto& img = c.projector.image_head.weight;
    const auto& txt = c.projector.text_head.weight;
    if (img.rows() != txt.rows() || img.cols() != txt.cols()) {
        throw ShapeError("checkpoint: image head " + img.shape_string() + " and text head " + txt.shape_string() +
                         " must share a shape");
    }
    json meta = c.extra.is_object() ? c.extra : json::object();
    meta["config"] = to_json(c.config);
    meta["best_val_loss"] = c.best_val_loss;
    meta["epoch_reached"] = c.epoch_reached;
    meta["best_epoch"] = c.best_epoch;
    const std::string meta_text = meta.dump();

    io::ByteWriter w;
    w.bytes(kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(img.rows()));
    w.u32(static_cast<std::uint32_t>(img.cols()));
    w.f32s(img.data());
    w.f32s(txt.data());
    w.f32(c.projector.log_logit_scale);
    w.u32(static_cast<std::uint32_t>(meta_text.size()));
    w.bytes(meta_text);
    return w.buffer();
}

Checkpoint decode_checkpoint(std::span<const char> bytes, const std::string& what) {
    io::ByteReader r(bytes, what);
    if (r.bytes(4) != kCheckpointMagic) throw FormatError(what + ": bad magic (expected CCKP)");
    if (const auto v = r.u32(); v != kCheckpointVersion) {
        throw FormatError(what + ": unsupported checkpoint version " + std::to_string(v));
    }
    const std::size_t d_in = r.u32();
    const std::size_t d_out = r.u32();
    if (d_in == 0 || d_out == 0) throw FormatError(what + ": zero projection dimension");
    if (d_in * d_out > r.remaining() / 8) {
        throw FormatError(what + ": truncated (shape " + std::to_string(d_in) + "x" + std::to_string(d_out) + ")");
    }
    Checkpoint c;
    c.projector.image_head.weight = Matrix(d_in, d_out);
    c.projector.text_head.weight = Matrix(d_in, d_out);
    r.f32s(c.projector.image_head.weight.data());
    r.f32s(c.projector.text_head.weight.data());
    c.projector.log_logit_scale = r.f32();
    const std::size_t meta_len = r.u32();
    const std::string meta_text = r.bytes(meta_len);
    if (r.remaining() != 0) throw FormatError(what + ": " + std::to_string(r.remaining()) + " trailing bytes");

    json meta;
    try {
        meta = json::parse(meta_text);
        c.config = train_config_from_json(meta.at("config"));
        c.best_val_loss = meta.at("best_val_loss").get<double>();
        c.epoch_reached = meta.at("epoch_reached").get<std::size_t>();
        c.best_epoch = meta.value("best_epoch", std::size_t{0});
    } catch (const json::exception& e) {
        throw FormatError(what + ": bad metadata: " + e.what());
    }
    for (const char* key : {"config", "best_val_loss", "epoch_reached", "best_epoch"}) meta.erase(key);
    c.extra = std::move(meta);
    return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    io::write_file(path, encode_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const auto bytes = io::read_file(path);
    return decode_checkpoint(bytes, path.string());
}

}  // namespace dcglab
