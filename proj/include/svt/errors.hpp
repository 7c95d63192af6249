#pragma once

#include <stdexcept>
#include <string>

namespace svt {

// Base class for all library errors. The what() string always starts with
// the concrete error name so CLI diagnostics stay distinguishable.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define SVT_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg)                         \
            : Error(std::string(#Name) + ": " + msg) {}               \
    }

// taxonomy
SVT_DEFINE_ERROR(EmptyPath);
SVT_DEFINE_ERROR(InconsistentHierarchy);
SVT_DEFINE_ERROR(SameClass);

// embedder
SVT_DEFINE_ERROR(BadDims);
SVT_DEFINE_ERROR(ZeroPreNormVector);
SVT_DEFINE_ERROR(ShapeMismatch);

// margins
SVT_DEFINE_ERROR(EmptyClass);
SVT_DEFINE_ERROR(MissingEmbeddings);

// pair loss
SVT_DEFINE_ERROR(UnknownClass);

// sampler
SVT_DEFINE_ERROR(TooFewClasses);
SVT_DEFINE_ERROR(EmptyLeaf);

// trainer
SVT_DEFINE_ERROR(DivergedLoss);

// retrieval
SVT_DEFINE_ERROR(KTooLarge);
SVT_DEFINE_ERROR(BadLevel);

// dataset / config io
SVT_DEFINE_ERROR(ParseError);
SVT_DEFINE_ERROR(DimMismatch);
SVT_DEFINE_ERROR(DuplicateId);

#undef SVT_DEFINE_ERROR

}  // namespace svt
