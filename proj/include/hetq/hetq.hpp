#pragma once

#include "hetq/bitpack.hpp"
#include "hetq/config_io.hpp"
#include "hetq/error.hpp"
#include "hetq/memsys.hpp"
#include "hetq/noise.hpp"
#include "hetq/noise_model.hpp"
#include "hetq/partition.hpp"
#include "hetq/pipeline.hpp"
#include "hetq/quantizer.hpp"
#include "hetq/report.hpp"
#include "hetq/rng.hpp"
#include "hetq/sweep.hpp"
#include "hetq/synthetic.hpp"
#include "hetq/tensor.hpp"
#include "hetq/tensor_store.hpp"
