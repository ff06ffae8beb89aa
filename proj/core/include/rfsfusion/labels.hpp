#pragma once

#include <compare>
#include <string>

namespace rfs {

/// Track label: (birth time, index within that birth time). Unique per track
/// over the whole run.
struct Label {
    int time = 0;
    int index = 0;

    auto operator<=>(const Label&) const = default;
};

inline std::string to_string(const Label& l) {
    return std::to_string(l.time) + ":" + std::to_string(l.index);
}

} // namespace rfs
