class ErdlabError(Exception):
    """Base class for every error raised by erdlab."""


class DomainError(ErdlabError, ValueError):
    """An argument lies outside the domain of the operation (e.g. t not in [0, 1])."""


class ContractError(ErdlabError, ValueError):
    """Inputs violate a shape, pairing or finiteness contract."""


class DegenerateSpectrumError(ContractError): ...


class DegenerateKernelError(ContractError): ...


class TrainingFault(ErdlabError, RuntimeError):
    def __init__(self, message: str, iteration: int):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration


class ConfigError(ErdlabError):
    """Bad configuration or command-line usage."""


class MissingCheckpointError(ErdlabError, FileNotFoundError): ...
