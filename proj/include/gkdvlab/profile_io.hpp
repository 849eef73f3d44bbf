#pragma once

// Binary container for a finished ProfileSet: fixed header with the grid,
// then named double arrays (profiles and the stage constants as length-1
// records), then an FNV-1a checksum of everything before it. All fields are
// little-endian; the static_assert pins the build to such targets so the
// on-disk format is unambiguous.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "profiles.hpp"

namespace gkdvlab {

static_assert(std::endian::native == std::endian::little,
              "profile container is defined little-endian");

namespace detail {

inline constexpr char kProfileMagic[8] = {'G', 'K', 'D', 'V', 'P', 'R', 'F', '1'};

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

template <class T>
void put(std::string& buf, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
}

inline void put_array(std::string& buf, const std::string& name, const double* v, std::int64_t len) {
    put(buf, (std::int64_t)name.size());
    buf.append(name);
    put(buf, len);
    buf.append(reinterpret_cast<const char*>(v), sizeof(double) * (size_t)len);
}

struct Cursor {
    const std::string& buf;
    size_t pos = 0;
    template <class T>
    T get() {
        if (pos + sizeof(T) > buf.size()) throw ConfigInvalid("profile container truncated");
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    std::string get_bytes(size_t n) {
        if (pos + n > buf.size()) throw ConfigInvalid("profile container truncated");
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace detail

inline void save_profiles(const ProfileSet& ps, const std::string& path) {
    using namespace detail;
    std::string buf;
    buf.append(kProfileMagic, sizeof(kProfileMagic));
    const LineGrid& g = ps.gs.grid;
    put(buf, g.y_min);
    put(buf, g.y_max);
    put(buf, (std::int64_t)g.n);

    const std::pair<std::string, const Field*> arrays[] = {
        {"R", &ps.R},   {"P", &ps.P},   {"A1", &ps.A1}, {"A2", &ps.A2},
        {"A3", &ps.A3}, {"A4", &ps.A4}, {"A5", &ps.A5}, {"A5s", &ps.A5s}};
    const std::pair<std::string, double> scalars[] = {
        {"c1", ps.c1}, {"c2", ps.c2}, {"c3", ps.c3}, {"c4s", ps.c4s}};

    put(buf, (std::int64_t)(std::size(arrays) + std::size(scalars)));
    for (const auto& [name, f] : arrays) put_array(buf, name, f->values.data(), g.n);
    for (const auto& [name, v] : scalars) put_array(buf, name, &v, 1);

    const std::uint64_t h = fnv1a(buf);
    put(buf, h);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigInvalid("save_profiles: cannot open " + path);
    out.write(buf.data(), (std::streamsize)buf.size());
    if (!out) throw ConfigInvalid("save_profiles: write failed for " + path);
}

inline ProfileSet load_profiles(const std::string& path) {
    using namespace detail;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigInvalid("load_profiles: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kProfileMagic) + sizeof(std::uint64_t))
        throw ConfigInvalid("profile container truncated");

    const std::string payload = buf.substr(0, buf.size() - sizeof(std::uint64_t));
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + payload.size(), sizeof stored);
    if (fnv1a(payload) != stored) throw ConfigInvalid("profile container checksum mismatch");

    Cursor c{payload};
    if (c.get_bytes(sizeof(kProfileMagic)) != std::string(kProfileMagic, sizeof(kProfileMagic)))
        throw ConfigInvalid("profile container has wrong magic");

    const double y_min = c.get<double>();
    const double y_max = c.get<double>();
    const int n = (int)c.get<std::int64_t>();
    const LineGrid g(y_min, y_max, n); // constructor validates

    std::map<std::string, std::vector<double>> rec;
    const auto count = c.get<std::int64_t>();
    for (std::int64_t r = 0; r < count; ++r) {
        const auto name_len = c.get<std::int64_t>();
        const std::string name = c.get_bytes((size_t)name_len);
        const auto len = c.get<std::int64_t>();
        std::vector<double> v((size_t)len);
        const std::string bytes = c.get_bytes(sizeof(double) * (size_t)len);
        std::memcpy(v.data(), bytes.data(), bytes.size());
        rec[name] = std::move(v);
    }

    auto field = [&](const std::string& name) {
        auto it = rec.find(name);
        if (it == rec.end() || (int)it->second.size() != g.n)
            throw ConfigInvalid("profile container missing array " + name);
        Field f(Grid{g});
        f.values = it->second;
        return f;
    };
    auto scalar = [&](const std::string& name) {
        auto it = rec.find(name);
        if (it == rec.end() || it->second.size() != 1)
            throw ConfigInvalid("profile container missing scalar " + name);
        return it->second[0];
    };

    ProfileSet ps;
    ps.gs = build_ground_state(g);
    ps.R = field("R");
    ps.P = field("P");
    ps.A1 = field("A1");
    ps.A2 = field("A2");
    ps.A3 = field("A3");
    ps.A4 = field("A4");
    ps.A5 = field("A5");
    ps.A5s = field("A5s");
    ps.c1 = scalar("c1");
    ps.c2 = scalar("c2");
    ps.c3 = scalar("c3");
    ps.c4s = scalar("c4s");
    materialize_v(ps);

    ps.cls_R = check_left_class(ps.R, -1, "R");
    ps.cls_P = check_left_class(ps.P, 0, "P");
    ps.cls_A1 = check_left_class(ps.A1, 0, "A1", 1e-6, false);
    ps.cls_A2 = check_left_class(ps.A2, -1, "A2");
    ps.cls_A3 = check_left_class(ps.A3, 1, "A3");
    ps.cls_A4 = check_left_class(ps.A4, 1, "A4");
    ps.cls_A5 = check_left_class(ps.A5, 2, "A5");
    ps.cls_A5s = check_left_class(ps.A5s, 1, "A5s");
    return ps;
}

} // namespace gkdvlab
