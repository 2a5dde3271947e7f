#include "pairdqn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pairdqn::nn {

const char* kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::PAIR_VDN: return "pairvdn";
        case ModelKind::VDN: return "vdn";
        case ModelKind::IQL: return "iql";
    }
    throw std::invalid_argument("kind_name: bad kind");
}

ModelKind kind_from_name(const std::string& name) {
    if (name == "pairvdn") return ModelKind::PAIR_VDN;
    if (name == "vdn") return ModelKind::VDN;
    if (name == "iql") return ModelKind::IQL;
    throw std::invalid_argument("unknown model kind: " + name);
}

namespace {

constexpr char kMagic[4] = {'P', 'D', 'Q', 'N'};
constexpr unsigned char kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

void put_f64s(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void get_f64s(std::istream& is, std::vector<double>& v, std::size_t count) {
    v.resize(count);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    ck.params.validate();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    os.put(static_cast<char>(ck.kind));
    put_u32(os, static_cast<std::uint32_t>(ck.n_agents));
    put_u32(os, static_cast<std::uint32_t>(ck.num_actions));
    put_u32(os, static_cast<std::uint32_t>(ck.params.layers.size()));
    put_u32(os, static_cast<std::uint32_t>(ck.params.input_dim()));
    for (const Layer& l : ck.params.layers) put_u32(os, static_cast<std::uint32_t>(l.out));
    for (const Layer& l : ck.params.layers) {
        put_u32(os, static_cast<std::uint32_t>(l.out));
        put_u32(os, static_cast<std::uint32_t>(l.in));
        put_f64s(os, l.w);
        put_f64s(os, l.b);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    const int version = is.get();
    if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
    Checkpoint ck;
    const int kind = is.get();
    if (kind < 0 || kind > 2) throw std::runtime_error("bad model kind in checkpoint");
    ck.kind = static_cast<ModelKind>(kind);
    ck.n_agents = static_cast<int>(get_u32(is));
    ck.num_actions = static_cast<int>(get_u32(is));
    const std::uint32_t num_layers = get_u32(is);
    get_u32(is);  // input dim, re-derived from per-layer records
    for (std::uint32_t k = 0; k < num_layers; ++k) get_u32(is);
    for (std::uint32_t k = 0; k < num_layers; ++k) {
        Layer l;
        l.out = static_cast<int>(get_u32(is));
        l.in = static_cast<int>(get_u32(is));
        if (!is || l.out < 1 || l.in < 1 || l.out > (1 << 24) || l.in > (1 << 24))
            throw std::runtime_error("corrupt checkpoint layer header");
        get_f64s(is, l.w, static_cast<std::size_t>(l.out) * l.in);
        get_f64s(is, l.b, static_cast<std::size_t>(l.out));
        ck.params.layers.push_back(std::move(l));
    }
    if (!is) throw std::runtime_error("truncated checkpoint: " + path);
    ck.params.validate();
    return ck;
}

}  // namespace pairdqn::nn
