#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crumple/binding.hpp"
#include "crumple/error.hpp"
#include "crumple/wire.hpp"

namespace crumple {

inline constexpr std::uint16_t kBindingFormatVersion = 1;

/// Serializes a weight table to the CRBW sidecar layout: magic, version,
/// alpha, counts, then one weight run per vertex.
inline std::vector<std::byte> encode_binding(const BindingTable& table) {
    wire::Writer w;
    w.magic("CRBW");
    w.u16(kBindingFormatVersion);
    w.f64(table.alpha);
    w.u32(table.vertex_count);
    w.u32(table.control_count);
    for (std::uint32_t v = 0; v < table.vertex_count; ++v) {
        const auto controls = table.controls_for(v);
        const auto weights = table.weights_for(v);
        w.u32(static_cast<std::uint32_t>(controls.size()));
        for (std::size_t k = 0; k < controls.size(); ++k) {
            w.u32(controls[k]);
            w.f64(weights[k]);
        }
    }
    return w.take();
}

inline BindingTable decode_binding(std::span<const std::byte> bytes) {
    wire::Reader r(bytes);
    r.expect_magic("CRBW", "binding table");
    const std::uint16_t version = r.u16();
    if (version != kBindingFormatVersion) {
        throw CodecError("unsupported binding table version " + std::to_string(version));
    }
    BindingTable table;
    table.alpha = r.f64();
    table.vertex_count = r.u32();
    table.control_count = r.u32();
    table.offsets.reserve(table.vertex_count + 1);
    table.offsets.push_back(0);
    for (std::uint32_t v = 0; v < table.vertex_count; ++v) {
        const std::uint32_t run = r.u32();
        for (std::uint32_t k = 0; k < run; ++k) {
            const std::uint32_t control = r.u32();
            const double weight = r.f64();
            if (control >= table.control_count) {
                throw CodecError("binding entry references control point out of range");
            }
            table.controls.push_back(control);
            table.weights.push_back(weight);
        }
        table.offsets.push_back(static_cast<std::uint32_t>(table.weights.size()));
    }
    r.expect_exhausted("binding table");
    table.canonical_dense = table.detect_canonical_dense();
    return table;
}

inline void write_binding_file(const std::filesystem::path& path, const BindingTable& table) {
    wire::write_bytes_file(path, encode_binding(table));
}

inline BindingTable read_binding_file(const std::filesystem::path& path) {
    return decode_binding(wire::read_bytes_file(path));
}

}  // namespace crumple
