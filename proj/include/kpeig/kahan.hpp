#pragma once

namespace kpeig {

/// Compensated (Kahan) accumulator. Tracks the rounding error of each
/// addition and feeds it back into the next one, so long sums of terms with
/// mixed magnitudes keep close to full double precision.
template <typename Value = double>
struct KahanAccumulator {
    Value sum = Value{0};
    Value compensation = Value{0};

    void add(Value value) {
        const Value y = value - compensation;
        const Value t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }

    KahanAccumulator& operator+=(Value value) {
        add(value);
        return *this;
    }

    [[nodiscard]] Value value() const { return sum; }
    operator Value() const { return sum; }
};

}  // namespace kpeig
