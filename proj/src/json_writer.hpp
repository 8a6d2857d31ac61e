#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace phaselab::detail {

// Deterministic JSON emitter: insertion order preserved, every float printed
// with 12 significant digits, non-finite values emitted as null.
class JsonWriter {
public:
    JsonWriter& begin_object() { open('{'); return *this; }
    JsonWriter& end_object() { close('}'); return *this; }
    JsonWriter& begin_array() { open('['); return *this; }
    JsonWriter& end_array() { close(']'); return *this; }

    JsonWriter& key(std::string_view name) {
        separate();
        out_ += fmt::format("\"{}\":", name);
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        separate();
        out_ += std::isfinite(v) ? fmt::format("{:.12g}", v) : "null";
        return *this;
    }
    JsonWriter& value(int v) { separate(); out_ += fmt::format("{}", v); return *this; }
    JsonWriter& value(std::int64_t v) { separate(); out_ += fmt::format("{}", v); return *this; }
    JsonWriter& value(bool v) { separate(); out_ += v ? "true" : "false"; return *this; }
    // Without this overload, string literals would decay to bool.
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(std::string_view v) {
        separate();
        out_ += '"';
        for (char c : v) {
            if (c == '"' || c == '\\') out_ += '\\';
            out_ += c;
        }
        out_ += '"';
        return *this;
    }
    JsonWriter& null() { separate(); out_ += "null"; return *this; }

    const std::string& str() const { return out_; }

private:
    void open(char c) {
        separate();
        out_ += c;
        first_.push_back(true);
    }
    void close(char c) {
        out_ += c;
        first_.pop_back();
    }
    void separate() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) out_ += ',';
            first_.back() = false;
        }
    }

    std::string out_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

} // namespace phaselab::detail
