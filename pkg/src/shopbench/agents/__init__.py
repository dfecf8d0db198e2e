"""Agent loops for the HTML, RAG, MCP and NLWeb interfaces."""

from .actions import (AgentAction, BrowseClick, BrowseFill, BrowseGoto, Finish, Invalid, PolicyDecision, Remember,
                      Search, ToolCall, Usage, action_from_dict, action_to_dict)
from .live import LiveChatPolicy
from .policy import CallbackPolicy, Observation, Policy, PolicyContext, PolicyError, ScriptedPolicy
from .runners import (CHECKOUT_DETAILS, DEFAULT_MAX_STEPS, INTERFACES, AgentConfig, AgentEnv, InterfaceError,
                      run_agent, run_html_agent, run_mcp_agent, run_nlweb_agent, run_rag_agent)
from .transcript import Step, Transcript

__all__ = [
    "AgentAction", "AgentConfig", "AgentEnv", "BrowseClick", "BrowseFill", "BrowseGoto", "CHECKOUT_DETAILS",
    "CallbackPolicy", "DEFAULT_MAX_STEPS", "Finish", "INTERFACES", "InterfaceError", "Invalid", "LiveChatPolicy",
    "Observation", "Policy", "PolicyContext", "PolicyDecision", "PolicyError", "Remember", "ScriptedPolicy",
    "Search", "Step", "ToolCall", "Transcript", "Usage", "action_from_dict", "action_to_dict", "run_agent",
    "run_html_agent", "run_mcp_agent", "run_nlweb_agent", "run_rag_agent",
]
