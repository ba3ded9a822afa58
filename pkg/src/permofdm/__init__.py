"""permofdm: link-level simulation of permutation-secured OFDM.

The physical layer scrambles time-domain OFDM samples with a keyed
permutation before transmission; the receiver equalizes per subcarrier
and inverts the permutation.  This package provides the modem, the
keyed cipher, multipath/AWGN channel models, equalizers with noise
analysis, chosen-plaintext attack estimators, and a reproducible
Monte-Carlo harness with a CSV-reporting CLI.
"""

from ._kernels import JIT_ENABLED
from .channel import (
    ChannelProfile,
    ChannelRealization,
    NoiseSpec,
    add_awgn,
    apply_channel_stream,
    draw_rayleigh_channel,
    freq_response,
    rms_delay_spread,
)
from .equalizer import (
    EqualizerKind,
    NoiseMixing,
    ber_awgn_qam,
    conditional_snr_zf,
    equalize,
    equalizer_weights,
    noise_mixing_row,
    qfunc,
    semi_analytic_ber,
)
from .errors import (
    AmbiguousMatchWarning,
    BruteForceCostError,
    FramingError,
    IqFormatError,
    KeyFormatError,
    ShapeError,
    SingularChannelError,
)
from .attack import (
    AttackConfig,
    averaging_attack,
    brute_force_attack,
    match_noiseless,
    recovery_rate,
)
from .harness import (
    AttackRecoveryConfig,
    BerExperimentConfig,
    CSV_HEADER,
    FIVE_TAP_PROFILE,
    IciReport,
    PointResult,
    SerAttackConfig,
    SnrAnalysisConfig,
    TrialReport,
    analyze_snr,
    ici_alpha_exact,
    measure_ici,
    mix_samples,
    run_attack_recovery_experiment,
    run_ber_experiment,
    run_ser_attack_experiment,
    wald_halfwidth,
)
from .modem import (
    QamConstellation,
    add_cp,
    binary_to_gray,
    fft_demodulate,
    gray_to_binary,
    ifft_modulate,
    qam_demodulate,
    qam_modulate,
    qam_point_indices,
    remove_cp,
)
from .permcipher import (
    Permutation,
    SecretKey,
    decrypt_block,
    derive_permutation,
    encrypt_block,
    keyspace_bits,
    transpose_interleaver,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousMatchWarning", "AttackConfig", "AttackRecoveryConfig",
    "BerExperimentConfig", "BruteForceCostError", "CSV_HEADER", "ChannelProfile",
    "ChannelRealization", "EqualizerKind", "FIVE_TAP_PROFILE", "FramingError",
    "IciReport", "IqFormatError", "JIT_ENABLED", "KeyFormatError",
    "NoiseMixing", "NoiseSpec", "Permutation", "PointResult",
    "QamConstellation", "SecretKey", "SerAttackConfig", "ShapeError",
    "SingularChannelError", "SnrAnalysisConfig", "TrialReport",
    "add_awgn", "add_cp", "analyze_snr", "apply_channel_stream",
    "averaging_attack", "ber_awgn_qam", "binary_to_gray",
    "brute_force_attack", "conditional_snr_zf", "decrypt_block",
    "derive_permutation", "draw_rayleigh_channel", "encrypt_block",
    "equalize", "equalizer_weights", "fft_demodulate", "freq_response",
    "gray_to_binary", "ici_alpha_exact", "ifft_modulate", "keyspace_bits",
    "match_noiseless", "measure_ici", "mix_samples", "noise_mixing_row",
    "qam_demodulate", "qam_modulate", "qam_point_indices", "qfunc",
    "recovery_rate", "remove_cp", "rms_delay_spread",
    "run_attack_recovery_experiment", "run_ber_experiment",
    "run_ser_attack_experiment", "semi_analytic_ber", "transpose_interleaver",
    "wald_halfwidth",
]
