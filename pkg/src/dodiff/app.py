"""
The application object behind the command line.

Commands register themselves by name and receive the parsed run
configuration. The application owns the logging setup, the debug flag
and the default worker count, and turns library errors into exit codes.

    app = App()

    @app.command('kernel', help='Tabulate B_n(t)')
    def kernel_command(app, run_config, **options):
        ...
        return ExitCode.SUCCESS

    app.run('kernel', run_config)
"""
import copy
import logging
import threading
import typing as t
from collections import OrderedDict

from .helper import exceptions
from .helper import util
from .helper.validation import check_instance_of


class ExitCode:
    SUCCESS = 0
    VALIDATION_FAILURE = 1
    CONFIG_ERROR = 2
    NUMERICAL_FAILURE = 3


# Errors caused by the input document rather than by the numerics
CONFIG_ERRORS = (
    exceptions.ConfigError,
    exceptions.InvalidDiffusionParameterError,
)


class Command(t.NamedTuple):
    name: str
    handler: t.Callable
    help: str
    needs_config: bool


__lock__ = threading.RLock()


class App:
    """
    Entry point of the application.
    """

    DEFAULT_CONFIGS = OrderedDict({
        'debug': False,
        'verbose': False,
        'log_path': None,
        'threads': 1,
    })

    # Key: (type, default) of the keyword arguments accepted by App.command
    COMMAND_PROPS = OrderedDict({
        'help': (str, ''),
        # Commands such as 'validate' run without a configuration document
        'needs_config': (bool, True),
    })

    def __init__(self,
                 module_name: str = util.LOGGER_ROOT,
                 debug: bool = False,
                 verbose: bool = False,
                 log_path: str = None,
                 threads: int = 1):
        #: Name of the root logger configured by this instance
        self.module_name = module_name

        # Create default configs dictating behavior of application
        # during runtime
        self.config = self.get_new_configs(debug, verbose, log_path, threads)

        # Command name -> Command, in registration order
        self.commands: t.Dict[str, Command] = OrderedDict()

        self.logger = self.configure_logging()
        self.log_debug(f"App '{module_name}' is initialized")

    # ------------------------
    # ------ Properties ------
    # ------------------------

    @staticmethod
    def get_new_configs(debug: bool,
                        verbose: bool,
                        log_path: t.Optional[str],
                        threads: int) -> t.Dict:
        """
        Creates a new set of configurations for the current instance.
        :return: A configuration dictionary
        """
        new_config: OrderedDict = copy.deepcopy(App.DEFAULT_CONFIGS)
        new_config['debug'] = debug
        new_config['verbose'] = verbose
        new_config['log_path'] = log_path
        new_config['threads'] = threads
        return new_config

    @property
    def debug(self) -> bool:
        return self.config['debug']

    @debug.setter
    def debug(self, new_mode):
        if type(new_mode) != bool:
            raise TypeError("App.debug must be set to either True or False. "
                            f"Set to value: {new_mode} of type {type(new_mode)}")
        self.config['debug'] = new_mode
        self.logger = self.configure_logging()

    @property
    def threads(self) -> int:
        return self.config['threads']

    @threads.setter
    def threads(self, count):
        if type(count) != int or count < 1:
            raise TypeError(f"App.threads must be a positive integer. Got: {count!r}")
        self.config['threads'] = count

    @property
    def logging_level(self) -> int:
        if self.config['debug']:
            return logging.DEBUG
        if self.config['verbose']:
            return logging.INFO
        return logging.WARNING

    # --------------------------
    # ----- Public Methods -----
    # --------------------------

    def configure_logging(self) -> logging.Logger:
        with __lock__:
            return util.logger_factory(self.module_name,
                                       level=self.logging_level,
                                       file_name=self.config['log_path'])

    def log_debug(self, msg: str, logging_type: int = logging.DEBUG) -> None:
        """
        Log the message only when running in debug mode
        :param msg: The message to log
        :param logging_type: The logging level as specified in the logging module
        """
        if self.debug:
            self.logger.log(logging_type, msg)

    def command(self, name: str, **kwargs) -> t.Callable:
        """
        Register a command handler under the given name.
        The handler is called as handler(app, run_config, **options)
        and returns an exit code.
        """
        check_instance_of(name, str)
        properties = util.create_properties(App.COMMAND_PROPS, **kwargs)

        def wrapper(handler: t.Callable) -> t.Callable:
            if name in self.commands:
                raise ValueError(f"Command '{name}' is already registered")
            self.commands[name] = Command(name, handler, properties['help'], properties['needs_config'])
            self.log_debug(f"Registered command '{name}' -> {util.get_unique_func_name(handler)}")
            return handler

        return wrapper

    def run(self, name: str, run_config: t.Any = None, **options) -> int:
        """
        Run a registered command and map its errors onto exit codes:
        2 for errors in the configuration, 3 for every other dodiff error.
        Extra options are forwarded to the handler.
        """
        if name not in self.commands:
            raise KeyError(f"Unknown command '{name}'. Expected one of {list(self.commands)}")
        command = self.commands[name]
        if command.needs_config and run_config is None:
            self.logger.error(f"'{name}' needs a configuration document (--config)")
            return ExitCode.CONFIG_ERROR

        try:
            return command.handler(self, run_config, **options)
        except CONFIG_ERRORS as error:
            self.logger.error(f"{name}: invalid input: {error}")
            return ExitCode.CONFIG_ERROR
        except exceptions.DodiffError as error:
            self.logger.error(f"{name} failed in {type(error).__name__}: {error}")
            if error.errors:
                self.log_debug(f"{name} error details: {error.errors}", logging.ERROR)
            return ExitCode.NUMERICAL_FAILURE
        except (TypeError, ValueError) as error:
            self.logger.error(f"{name}: invalid input: {error}")
            return ExitCode.CONFIG_ERROR
