#pragma once

#include "qic/ansatz.hpp"
#include "qic/bench.hpp"
#include "qic/codec.hpp"
#include "qic/error.hpp"
#include "qic/image_io.hpp"
#include "qic/optimize.hpp"
#include "qic/pipeline.hpp"
#include "qic/statevec.hpp"
#include "qic/transfer.hpp"
