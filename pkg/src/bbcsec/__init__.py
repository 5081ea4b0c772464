"""Capacity-equivocation and secrecy regions of the bidirectional broadcast
channel with a confidential message, plus a desk-scale random-coding
simulator that measures error rates and equivocation directly."""

__version__ = "0.1.0"

from ._core import backend_name as kernel_backend  # noqa: F401
from .channel import (  # noqa: F401
    BroadcastChannel,
    MarginalChannel,
    binary_symmetric,
    from_marginals,
    load_channel,
    marginal,
    save_channel,
)
from .codebook import Codebook, CodebookParams, generate, is_typical, rate_check  # noqa: F401
from .coding import (  # noqa: F401
    EncodedBlock,
    MessageSets,
    Partition,
    decode_node1,
    decode_node2,
    decode_node2_inner,
    encode,
    make_partition,
    transmit,
)
from .exceptions import BbcsecError, GuardError, ValidationError  # noqa: F401
from .probability import (  # noqa: F401
    CondDist,
    Dist,
    JointDist,
    chain_joint,
    conditional_mutual_information,
    entropy,
    marginalize,
)
from .region import (  # noqa: F401
    AuxChain,
    InfoQuantities,
    MembershipResult,
    RateTuple,
    SearchParams,
    SupportResult,
    bbc_frontier,
    evaluate_chain,
    membership,
    rc_re_star,
    secrecy_frontier,
    support_function,
    full_frontier,
    tuple_satisfied,
)
from .simulate import (  # noqa: F401
    SimConfig,
    SimReport,
    asymptotic_terms,
    equivocation_exact,
    equivocation_mc,
    run,
)
