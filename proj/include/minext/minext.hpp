#pragma once

#include "minext/cyclic_signal.hpp"
#include "minext/error.hpp"
#include "minext/experiment.hpp"
#include "minext/fft.hpp"
#include "minext/json_io.hpp"
#include "minext/kernel_certificate.hpp"
#include "minext/l1_recovery.hpp"
#include "minext/omega_sampling.hpp"
#include "minext/random.hpp"
#include "minext/tail_bounds.hpp"
