#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crumple/error.hpp"
#include "crumple/vehicle.hpp"
#include "crumple/wire.hpp"

namespace crumple {

inline constexpr std::uint16_t kSnapshotFormatVersion = 1;

/// The shareable damage state: core pose plus one body-frame rest delta per
/// control node. Everything is stored at 32-bit precision, matching the wire
/// layout, so encode/decode round-trips are bit-exact by construction. This
/// low-dimensional record fully determines the deformed surface.
struct DeformationSnapshot {
    std::uint32_t vehicle_id = 0;
    std::uint32_t frame = 0;
    double clock = 0.0;
    std::array<float, 3> position{};
    std::array<float, 4> orientation{1.0f, 0.0f, 0.0f, 0.0f};  // w, x, y, z
    std::vector<std::array<float, 3>> deltas;  // body_rest - body_rest_initial

    bool operator==(const DeformationSnapshot&) const = default;

    Pose pose() const {
        return {Vec3{position[0], position[1], position[2]},
                Quat{orientation[0], orientation[1], orientation[2], orientation[3]}};
    }
};

inline DeformationSnapshot take_snapshot(const VehicleWorld& world, std::uint32_t vehicle_id) {
    DeformationSnapshot snap;
    snap.vehicle_id = vehicle_id;
    snap.frame = static_cast<std::uint32_t>(world.frame);
    snap.clock = world.clock;
    snap.position = {static_cast<float>(world.core.position.x),
                     static_cast<float>(world.core.position.y),
                     static_cast<float>(world.core.position.z)};
    snap.orientation = {static_cast<float>(world.core.orientation.w),
                        static_cast<float>(world.core.orientation.x),
                        static_cast<float>(world.core.orientation.y),
                        static_cast<float>(world.core.orientation.z)};
    snap.deltas.reserve(world.nodes.size());
    for (const NodeState& n : world.nodes) {
        const Vec3 d = n.body_rest - n.body_rest_initial;
        snap.deltas.push_back({static_cast<float>(d.x), static_cast<float>(d.y),
                               static_cast<float>(d.z)});
    }
    return snap;
}

/// Layout: magic CRSN, version u16, vehicle id u32, frame u32, clock f64,
/// pose 7 x f32 (position then quaternion), count u32, count x 3 x f32 deltas;
/// little-endian throughout.
inline std::vector<std::byte> encode_snapshot(const DeformationSnapshot& snap) {
    wire::Writer w;
    w.magic("CRSN");
    w.u16(kSnapshotFormatVersion);
    w.u32(snap.vehicle_id);
    w.u32(snap.frame);
    w.f64(snap.clock);
    for (const float f : snap.position) w.f32(f);
    for (const float f : snap.orientation) w.f32(f);
    w.u32(static_cast<std::uint32_t>(snap.deltas.size()));
    for (const auto& d : snap.deltas) {
        w.f32(d[0]);
        w.f32(d[1]);
        w.f32(d[2]);
    }
    return w.take();
}

inline DeformationSnapshot decode_snapshot(std::span<const std::byte> bytes) {
    wire::Reader r(bytes);
    r.expect_magic("CRSN", "deformation snapshot");
    const std::uint16_t version = r.u16();
    if (version != kSnapshotFormatVersion) {
        throw CodecError("unsupported snapshot version " + std::to_string(version));
    }
    DeformationSnapshot snap;
    snap.vehicle_id = r.u32();
    snap.frame = r.u32();
    snap.clock = r.f64();
    for (float& f : snap.position) f = r.f32();
    for (float& f : snap.orientation) f = r.f32();
    const std::uint32_t count = r.u32();
    snap.deltas.resize(count);
    for (auto& d : snap.deltas) {
        d[0] = r.f32();
        d[1] = r.f32();
        d[2] = r.f32();
    }
    r.expect_exhausted("deformation snapshot");
    return snap;
}

/// Overwrites the world's plastic state with a decoded snapshot and transports
/// the vehicle to the recorded pose, leaving the shell settled (no transient
/// elastic offsets).
inline void apply_snapshot(VehicleWorld& world, const DeformationSnapshot& snap) {
    if (snap.deltas.size() != world.nodes.size()) {
        throw AssemblyError("snapshot delta count does not match control node count");
    }
    for (std::size_t i = 0; i < world.nodes.size(); ++i) {
        const auto& d = snap.deltas[i];
        world.nodes[i].body_rest =
            world.nodes[i].body_rest_initial + Vec3{d[0], d[1], d[2]};
    }
    // set_pose leaves every node settled exactly on its migrated rest.
    set_pose(world, snap.pose());
    world.frame = snap.frame;
    world.clock = snap.clock;
}

}  // namespace crumple
