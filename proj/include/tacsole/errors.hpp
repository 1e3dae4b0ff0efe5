#pragma once

#include <stdexcept>
#include <string>

namespace tacsole {

// Base class for every error thrown by this library. Pipelines catch this
// at the CLI boundary and map it to exit code 1.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Image/ROI dimensions do not fit together.
class geometry_error : public error {
public:
    explicit geometry_error(const std::string& what) : error(what) {}
};

// A frame source (directory, URL) cannot be opened or is ill-formed.
class source_error : public error {
public:
    explicit source_error(const std::string& what) : error(what) {}
};

// A synthetic scene violates its preconditions (primitive outside ROI,
// wrong marker count, unknown class).
class scene_error : public error {
public:
    explicit scene_error(const std::string& what) : error(what) {}
};

// A calibration annotation is inconsistent with the frame it describes.
class annotation_error : public error {
public:
    explicit annotation_error(const std::string& what) : error(what) {}
};

// A dataset is empty or otherwise unusable for training/evaluation.
class data_error : public error {
public:
    explicit data_error(const std::string& what) : error(what) {}
};

// Training produced a non-finite loss.
class divergence_error : public error {
public:
    explicit divergence_error(const std::string& what) : error(what) {}
};

// Marker tracking cannot proceed (empty rest set).
class tracking_error : public error {
public:
    explicit tracking_error(const std::string& what) : error(what) {}
};

// Too few detected vectors to fill in the missing ones.
class interpolation_error : public error {
public:
    explicit interpolation_error(const std::string& what) : error(what) {}
};

// A model file is malformed or does not match the data it is applied to.
class model_error : public error {
public:
    explicit model_error(const std::string& what) : error(what) {}
};

// Non-finite values where finite ones are required.
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& what) : error(what) {}
};

// Controller received a non-finite error input.
class controller_error : public error {
public:
    explicit controller_error(const std::string& what) : error(what) {}
};

// File/serialization problems.
class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

} // namespace tacsole
