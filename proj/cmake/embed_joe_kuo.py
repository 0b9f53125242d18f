#!/usr/bin/env python3
"""Convert a Joe-Kuo direction-number file (`d s a m_i` rows) into a C++ source."""
import sys


def main(src, dst):
    degrees, polys, offsets, ms = [], [], [], []
    with open(src) as f:
        next(f)  # header
        for line in f:
            parts = line.split()
            if not parts:
                continue
            s, a = int(parts[1]), int(parts[2])
            m = [int(v) for v in parts[3:3 + s]]
            if len(m) != s:
                raise SystemExit(f"malformed row: {line!r}")
            degrees.append(s)
            polys.append(a)
            offsets.append(len(ms))
            ms.extend(m)
    offsets.append(len(ms))

    def emit(out, name, ctype, values):
        out.write(f"extern const {ctype} {name}[] = {{\n")
        for i in range(0, len(values), 16):
            out.write("    " + ",".join(str(v) for v in values[i:i + 16]) + ",\n")
        out.write("};\n")

    with open(dst, "w") as out:
        out.write("// Generated from the Joe-Kuo direction-number table. Do not edit.\n")
        out.write("#include <cstdint>\n\nnamespace sgn::detail {\n\n")
        out.write(f"extern const std::uint32_t kJoeKuoRows = {len(degrees)};\n")
        emit(out, "kJoeKuoDegree", "std::uint8_t", degrees)
        emit(out, "kJoeKuoPoly", "std::uint32_t", polys)
        emit(out, "kJoeKuoOffset", "std::uint32_t", offsets)
        emit(out, "kJoeKuoM", "std::uint32_t", ms)
        out.write("\n}  // namespace sgn::detail\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
