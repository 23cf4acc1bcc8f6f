#pragma once

// Core library: no codec dependency. Include "unpad/io.hpp" or
// "unpad/commands.hpp" for file I/O and the batch commands.
#include "unpad/calibration.hpp"
#include "unpad/detector.hpp"
#include "unpad/error.hpp"
#include "unpad/image.hpp"
#include "unpad/parallel.hpp"
#include "unpad/report.hpp"
#include "unpad/synth.hpp"
#include "unpad/unpadder.hpp"
