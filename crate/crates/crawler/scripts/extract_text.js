return document.body ? document.body.innerText : '';
