#include <vector>
#include <string>

namespace gfx {

// ignoredInComment
template <typename Pixel>
class ImageBuffer : public BufferBase {
public:
    explicit ImageBuffer(std::size_t width) : width_(width) {}

    Pixel& at(std::size_t x) { return pixels_[x]; }

    void fill(const Pixel& value) {
        for (auto& p : pixels_) {
            p = value;
        }
        auto raw = R"(ignoredRawString)";
        std::string name = "ignoredInString";
        this->dirty_ = true;
    }

private:
    std::vector<Pixel> pixels_;
    std::size_t width_;
    bool dirty_ = false;
};

}  // namespace gfx
