#include "natanzon/errors.hpp"

namespace natanzon {

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::specfun: return "specfun";
        case Stage::mapping: return "mapping";
        case Stage::potential: return "potential";
        case Stage::spectrum: return "spectrum";
        case Stage::wavefunc: return "wavefunc";
        case Stage::algebra: return "algebra";
        case Stage::oracle: return "oracle";
        case Stage::config: return "config";
    }
    return "unknown";
}

}  // namespace natanzon
