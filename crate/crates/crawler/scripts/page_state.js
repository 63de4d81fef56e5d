return {
  readyState: document.readyState,
  href: location.href,
  innerWidth: window.innerWidth,
  innerHeight: window.innerHeight
};
